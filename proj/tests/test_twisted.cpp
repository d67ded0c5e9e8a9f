#include <random>

#include <gtest/gtest.h>

#include "moyalkit/oracle.hpp"
#include "moyalkit/twisted.hpp"
#include "oracles.hpp"

using namespace moyalkit;

namespace {

const PhaseGrid grid = PhaseGrid::uniform(2, 48, 7.0);
const SymplecticForm form = make_standard_form(1, 1.0);

struct Bump {
    double a;
    Vec center;
    double k;
    cd operator()(const Vec& x) const {
        return std::exp(cd(-a * (x - center).squaredNorm(), k * (x[0] - x[1])));
    }
    SampledSymbol sampled() const {
        return sample([this](std::span<const double> x) { return (*this)(Eigen::Map<const Vec>(x.data(), 2)); }, grid);
    }
};

Vec vec2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

const Bump b1{1.0, vec2(0.3, -0.2), 0.4};
const Bump b2{0.8, vec2(-0.5, 0.1), -0.3};
const Bump b3{1.2, vec2(0.0, 0.4), 0.2};

}  // namespace

TEST(Heisenberg, MatchesGroupLawAndIsAssociative) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const SymplecticForm f4 = make_standard_form(2, 0.7);
    for (int k = 0; k < 20; ++k) {
        GroupElement g[3];
        oracle::Group o[3];
        for (int j = 0; j < 3; ++j) {
            Vec s(4);
            for (int i = 0; i < 4; ++i) s[i] = u(rng);
            g[j] = {u(rng), s};
            o[j] = {g[j].alpha, s};
        }
        const auto prod = heisenberg_multiply(g[0], g[1], f4);
        const auto want = oracle::multiply(o[0], o[1], f4.matrix());
        EXPECT_NEAR(prod.alpha, want.alpha, 1e-14);
        const auto l = heisenberg_multiply(prod, g[2], f4);
        const auto r = heisenberg_multiply(g[0], heisenberg_multiply(g[1], g[2], f4), f4);
        EXPECT_NEAR(l.alpha, r.alpha, 1e-12);
        EXPECT_LT((l.s - r.s).norm(), 1e-14);
    }
}

TEST(TwistedConvolution, MatchesBruteForceSum) {
    const SampledSymbol g1 = b1.sampled(), g2 = b2.sampled();
    const SampledSymbol out = twisted_convolution(g1, g2, form);
    EXPECT_EQ(out.method(), "direct_quadrature");
    for (std::size_t i : {grid.origin_index(), grid.origin_index() + 5, grid.origin_index() - 7 * grid.stride(0) + 3}) {
        const cd want = oracle::twisted_convolution(b1, b2, form.matrix(), grid.node(i), 48, 7.0);
        EXPECT_LT(std::abs(out[i] - want), 1e-13);
    }
    const auto at = twisted_convolution_at(g1, g2, form, {grid.origin_index()});
    EXPECT_EQ(at[0], out[grid.origin_index()]);
}

TEST(TwistedConvolution, ZeroFormIsOrdinaryConvolution) {
    const SampledSymbol g1 = b1.sampled(), g2 = b2.sampled();
    EXPECT_EQ(sup_relative_error(twisted_convolution(g1, g2, SkewForm::zero(2)), ordinary_convolution(g1, g2)), 0.0);
}

TEST(TwistedConvolution, IsAssociativeAndConjugationReverses) {
    const SampledSymbol g1 = b1.sampled(), g2 = b2.sampled(), g3 = b3.sampled();
    const SampledSymbol l = twisted_convolution(twisted_convolution(g1, g2, form), g3, form);
    const SampledSymbol r = twisted_convolution(g1, twisted_convolution(g2, g3, form), form);
    EXPECT_LT(sup_relative_error(l, r), 1e-10);
    EXPECT_LT(sup_relative_error(twisted_convolution(g1, g2, form).conj(),
                                 twisted_convolution(g2.conj(), g1.conj(), form)),
              1e-13);
}

TEST(TwistedConvolution, RejectsMismatchedInputs) {
    const SampledSymbol g1 = b1.sampled();
    const SampledSymbol other = SampledSymbol::zeros(PhaseGrid::uniform(2, 32, 7.0));
    EXPECT_THROW(twisted_convolution(g1, other, form), Error);
    EXPECT_THROW(twisted_convolution(g1, g1, make_standard_form(2)), Error);
}

TEST(TwistedShift, MatchesDefinitionOffLattice) {
    const SampledSymbol g = b1.sampled();
    const Vec s = vec2(0.37, -0.61);
    for (bool conj : {false, true}) {
        const SampledSymbol moved = twisted_shift(g, s, form, conj);
        double err = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const Vec t = grid.node(i);
            const double ph = (conj ? -0.5 : 0.5) * form(s, t);
            err = std::max(err, std::abs(moved[i] - cd(std::cos(ph), std::sin(ph)) * b1(t - s)));
        }
        EXPECT_LT(err, 1e-12);
    }
}

TEST(TwistedShift, WarnsWhenMassLeavesTheBox) {
    const SampledSymbol g = b1.sampled();
    EXPECT_TRUE(twisted_shift(g, vec2(0.5, 0.0), form, false).warnings().empty());
    const SampledSymbol far = twisted_shift(g, vec2(6.5, 0.0), form, false);
    ASSERT_FALSE(far.warnings().empty());
    EXPECT_EQ(far.warnings().front(), warning::shift_out_of_box);
}

TEST(Functional, FactoriesValidate) {
    EXPECT_THROW(Functional::point_masses({}), Error);
    EXPECT_THROW(Functional::point_masses({{vec2(0, 0), cd(1.0)}, {Vec::Zero(3), cd(1.0)}}), Error);
    EXPECT_THROW(Functional::point_masses({{vec2(0, 0), cd(std::nan(""), 0.0)}}), Error);
    const SampledSymbol x4 = sample([](auto x) { return std::pow(x[0], 4); }, grid);
    EXPECT_NO_THROW(Functional::regular(x4, 4.0));
    try {
        Functional::regular(x4, 0.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::GrowthTooFast);
    }
    EXPECT_THROW(Functional::regular(x4, -1.0), Error);
}

TEST(Functional, PairingAndAdjoints) {
    const SampledSymbol phi = b1.sampled();
    const Vec a = vec2(0.41, -0.33);
    EXPECT_LT(std::abs(Functional::delta(a).pair(phi) - b1(a)), 1e-12);
    EXPECT_EQ(Functional::delta(grid.node(17)).pair(phi), phi[17]);
    EXPECT_EQ(Functional::delta(vec2(20.0, 0.0)).pair(phi), cd(0.0));
    const Functional pm = Functional::point_masses({{a, cd(1.0, 2.0)}, {-a, cd(0.5, 0.0)}});
    EXPECT_LT(std::abs(pm.pair(phi) - (cd(1.0, 2.0) * b1(a) + 0.5 * b1(-a))), 1e-12);
    EXPECT_LT(std::abs(pm.conj().pair(phi) - std::conj(pm.pair(phi.conj()))), 1e-12);
    EXPECT_LT(std::abs(pm.reflected().pair(phi) - pm.pair(phi.reflected())), 1e-12);
    const Functional reg = Functional::regular(b2.sampled(), 0.0);
    EXPECT_LT(std::abs(reg.conj().pair(phi) - std::conj(reg.pair(phi.conj()))), 1e-15);
    EXPECT_LT(std::abs(reg.reflected().pair(phi) - reg.pair(phi.reflected())), 1e-14);
    // on lattice points weighting and pairing commute up to rounding
    const SampledSymbol h = b3.sampled();
    const Functional lattice_pm = Functional::point_masses({{grid.node(1000), cd(1.0, 2.0)}, {grid.node(1400), cd(0.5)}});
    EXPECT_LT(std::abs(lattice_pm.weighted(h).pair(phi) - lattice_pm.pair(h * phi)), 1e-15);
}

TEST(ConvolveFunctional, DeltaIsTheUnitOnBothSides) {
    const SampledSymbol g = b1.sampled();
    for (Side side : {Side::left, Side::right})
        EXPECT_EQ(sup_relative_error(convolve_functional(Functional::delta(Vec::Zero(2)), g, form, side), g), 0.0);
}

TEST(ConvolveFunctional, DeltaGivesTwistedShifts) {
    const SampledSymbol g = b1.sampled();
    const Vec a = vec2(0.25, -0.5);
    EXPECT_EQ(sup_relative_error(convolve_functional(Functional::delta(a), g, form, Side::left),
                                 twisted_shift(g, a, form, true)),
              0.0);
    EXPECT_EQ(sup_relative_error(convolve_functional(Functional::delta(a), g, form, Side::right),
                                 twisted_shift(g, a, form, false)),
              0.0);
}

TEST(ConvolveFunctional, RegularMatchesBruteForce) {
    const SampledSymbol g = b1.sampled();
    const Functional v = Functional::regular(b2.sampled(), 0.0);
    const SampledSymbol left = convolve_functional(v, g, form, Side::left);
    const SampledSymbol right = convolve_functional(v, g, form, Side::right);
    EXPECT_EQ(left.method(), "pairing_quadrature");
    for (std::size_t i : {grid.origin_index(), grid.origin_index() + 4 * grid.stride(0) - 2}) {
        EXPECT_LT(std::abs(left[i] - oracle::twisted_convolution(b2, b1, form.matrix(), grid.node(i), 48, 7.0)), 1e-13);
        EXPECT_LT(std::abs(right[i] - oracle::twisted_convolution(b1, b2, form.matrix(), grid.node(i), 48, 7.0)), 1e-13);
    }
}

TEST(ConvolveFunctional, PolynomialMultiplierIsFinite) {
    const SampledSymbol g = b1.sampled();
    const SampledSymbol x1 = sample([](auto x) { return x[0]; }, grid);
    const SampledSymbol out = convolve_functional(Functional::regular(x1, 1.0), g, form, Side::left);
    EXPECT_TRUE(std::isfinite(out.sup_norm()));
    // growth exponent 0 is a false declaration for x1 against this probe
    const SampledSymbol slow = sample([](auto x) { return std::exp(-0.05 * (x[0] * x[0] + x[1] * x[1])); }, grid);
    EXPECT_THROW(convolve_functional(Functional::regular(sample([](auto x) { return x[0] * x[0] * x[0]; }, grid), 3.0),
                                     slow, form, Side::left),
                 Error);
}

TEST(Duality, PairedProductsAgree) {
    const SampledSymbol g = b1.sampled(), f = b2.sampled();
    const std::vector<Functional> vs = {Functional::delta(vec2(0.3, 0.2)),
                                        Functional::point_masses({{vec2(0.1, -0.4), cd(0.5, 1.0)}, {vec2(-0.7, 0.2), cd(2.0)}}),
                                        Functional::regular(b3.sampled(), 0.0)};
    for (const auto& v : vs)
        for (Side side : {Side::left, Side::right}) {
            const cd direct = quadrature(convolve_functional(v, g, form, side) * f);
            const cd dual = duality_convolution(v, g, f, form, side);
            EXPECT_LT(std::abs(direct - dual) / std::abs(dual), 1e-10);
        }
}

TEST(MultiplierCompose, DeltaDeltaClosedForm) {
    const SampledSymbol g = b1.sampled();
    const Vec a = vec2(0.25, 0.5), b = vec2(-0.75, 0.25);
    const auto c = multiplier_compose(Functional::delta(a), Functional::delta(b), g, form);
    const double ph = -0.5 * form(a, b);
    const cd want = cd(std::cos(ph), std::sin(ph)) * b1(-(a + b));
    EXPECT_LT(std::abs(c.left - want), 1e-12);
    EXPECT_LT(std::abs(c.right - want), 1e-12);
}

TEST(Continuity, DifferencesShrinkWithTheShift) {
    const SampledSymbol g = b1.sampled();
    std::vector<Vec> shifts;
    for (double r : {1.0, 0.1, 0.01}) shifts.push_back(r * vec2(1.0, 1.0).normalized());
    const auto table = shift_continuity_probe(g, form, shifts);
    ASSERT_EQ(table.size(), 3u);
    EXPECT_TRUE(continuity_trend_holds(table));
    EXPECT_LE(table.back().sup_difference * 10.0, table.front().sup_difference);
    // first-order behaviour: a tenth of the shift gives about a tenth of the difference
    EXPECT_NEAR(table[1].sup_difference / table[2].sup_difference, 10.0, 1.0);
    EXPECT_FALSE(continuity_trend_holds({{1.0, 1.0}, {0.1, 2.0}}));
}
