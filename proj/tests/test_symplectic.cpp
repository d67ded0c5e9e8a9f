#include <random>

#include <gtest/gtest.h>

#include "moyalkit/symplectic.hpp"

using namespace moyalkit;

namespace {

Vec random_vec(std::mt19937_64& rng, int d) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = u(rng);
    return v;
}

SymplecticForm random_form(std::mt19937_64& rng, int d) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> up(SkewForm::triangle_size(d));
    for (auto& x : up) x = u(rng);
    // add a dominant standard part so the draw is comfortably nondegenerate
    Mat m = SkewForm(d, up).matrix() + 3.0 * make_standard_form(d / 2).matrix();
    return SymplecticForm::from_matrix(m);
}

}  // namespace

TEST(SkewForm, MatrixIsAntisymmetricAndMatchesUpperTriangle) {
    const SkewForm f(4, {1, 2, 3, 4, 5, 6});
    const Mat m = f.matrix();
    EXPECT_EQ((m + m.transpose()).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(m(0, 1), 1.0);
    EXPECT_EQ(m(0, 3), 3.0);
    EXPECT_EQ(m(2, 3), 6.0);
    EXPECT_EQ(m(3, 2), -6.0);
}

TEST(SkewForm, RejectsWrongTriangleSize) {
    try {
        SkewForm(4, {1, 2, 3});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
    }
}

TEST(SkewForm, FromMatrixRejectsSymmetricPart) {
    Mat m = Mat::Zero(2, 2);
    m(0, 1) = 1.0;
    m(1, 0) = -0.5;
    EXPECT_THROW(SkewForm::from_matrix(m), Error);
}

TEST(SkewForm, EvaluationIsBilinearAndAlternating) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const SymplecticForm f = random_form(rng, 4);
        const Vec s = random_vec(rng, 4), t = random_vec(rng, 4), u = random_vec(rng, 4);
        EXPECT_NEAR(f(s, t), -f(t, s), 1e-12);
        EXPECT_NEAR(f(s, s), 0.0, 1e-12);
        EXPECT_NEAR(f(s + 2.0 * u, t), f(s, t) + 2.0 * f(u, t), 1e-11);
        EXPECT_NEAR(evaluate_form(f, s, t), s.dot(f.matrix() * t), 1e-12);
    }
}

TEST(SymplecticForm, OddDimensionIsDegenerate) {
    try {
        SymplecticForm(3, {1, 0, 1});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NearSingular);
    }
}

TEST(SymplecticForm, ZeroFormIsDegenerate) { EXPECT_THROW(SymplecticForm(SkewForm::zero(2)), Error); }

TEST(SymplecticForm, StandardFormHasUnitPairs) {
    const SymplecticForm j = make_standard_form(2, 0.5);
    EXPECT_EQ(j.dim(), 4);
    EXPECT_DOUBLE_EQ(j.entry(0, 2), 0.5);
    EXPECT_DOUBLE_EQ(j.entry(1, 3), 0.5);
    EXPECT_DOUBLE_EQ(j.entry(0, 1), 0.0);
    EXPECT_NEAR(j.determinant(), std::pow(0.5, 4), 1e-15);
    EXPECT_THROW(make_standard_form(1, 0.0), Error);
}

TEST(DualDeformation, TwoJIsFixedExactly) {
    for (int n : {1, 2, 3}) {
        const SymplecticForm two_j = make_standard_form(n, 2.0);
        EXPECT_TRUE(dual_deformation(two_j) == two_j);
    }
}

TEST(DualDeformation, IsAnInvolution) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const SymplecticForm f = random_form(rng, 4);
        const Mat back = dual_deformation(dual_deformation(f)).matrix();
        EXPECT_LT((back - f.matrix()).cwiseAbs().maxCoeff(), 1e-12 * f.matrix().cwiseAbs().maxCoeff());
    }
}

TEST(DualDeformation, HbarJMapsToFourOverHbar) {
    const SymplecticForm dual = dual_deformation(make_standard_form(1, 0.5));
    EXPECT_NEAR(dual.entry(0, 1), 8.0, 1e-14);
}

TEST(SymplecticBasis, PullsBackToStandardForm) {
    std::mt19937_64 rng(3);
    for (int d : {2, 4, 6}) {
        const SymplecticForm f = random_form(rng, d);
        const auto basis = symplectic_basis(f);
        const Mat pulled = basis.transform.transpose() * f.matrix() * basis.transform;
        EXPECT_LT((pulled - make_standard_form(d / 2).matrix()).cwiseAbs().maxCoeff(), 1e-10) << "d=" << d;
    }
}
