#include <set>

#include <gtest/gtest.h>

#include "moyalkit/gsnorm.hpp"
#include "moyalkit/oracle.hpp"
#include "oracles.hpp"

using namespace moyalkit;

namespace {

const PhaseGrid grid = PhaseGrid::uniform(2, 64, 8.0);

SampledSymbol gauss() { return sample([](auto x) { return std::exp(-(x[0] * x[0] + x[1] * x[1])); }, grid); }

long binomial(int n, int k) {
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

TEST(MultiIndices, EnumeratesEachOrderOnce) {
    for (int d : {1, 2, 4})
        for (int k = 0; k <= 6; ++k) {
            const auto all = multi_indices(d, k);
            EXPECT_EQ(static_cast<long>(all.size()), binomial(k + d - 1, d - 1));
            std::set<MultiIndex> uniq(all.begin(), all.end());
            EXPECT_EQ(uniq.size(), all.size());
            for (const auto& m : all) EXPECT_EQ(order(m), k);
        }
}

TEST(LogDenominator, UsesZeroToTheZeroIsOne) {
    EXPECT_EQ(log_denominator({0, 0}, 3.0, 0.5), 0.0);
    EXPECT_NEAR(log_denominator({0, 2}, 2.0, 0.5), 3.0 * std::log(2.0), 1e-15);
    EXPECT_NEAR(log_denominator({3, 1}, 1.0, 1.0), 3.0 * std::log(3.0), 1e-15);
}

TEST(SeminormSpec, Validates) {
    EXPECT_THROW(seminorm(gauss(), {0.0, 0.0, 0.5, 1}), Error);
    EXPECT_THROW(seminorm(gauss(), {0.0, 1.0, 0.0, 1}), Error);
    EXPECT_THROW(seminorm(gauss(), {0.0, 1.0, 0.5, 13}), Error);
    EXPECT_THROW(seminorm(gauss(), {0.0, 1.0, 0.5, -1}), Error);
}

TEST(Seminorm, MatchesAnalyticDerivativesOnTheGrid) {
    const SampledSymbol f = gauss();
    const SeminormSpec spec{1.5, 2.0, 0.5, 2};
    // partials of exp(-r^2) up to order 2
    auto partial = [](const MultiIndex& k, double x, double y) {
        auto h = [](int n, double t) { return n == 0 ? 1.0 : n == 1 ? -2.0 * t : 4.0 * t * t - 2.0; };
        return h(k[0], x) * h(k[1], y) * std::exp(-(x * x + y * y));
    };
    std::vector<double> per(3, 0.0);
    for (int k = 0; k <= 2; ++k)
        for (const auto& kappa : multi_indices(2, k))
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const Vec x = grid.node(i);
                const double v = std::pow(1.0 + x.norm(), spec.N) * std::abs(partial(kappa, x[0], x[1])) /
                                 std::exp(log_denominator(kappa, spec.B, spec.beta));
                per[k] = std::max(per[k], v);
            }
    const SeminormReport rep = seminorm(f, spec);
    ASSERT_EQ(rep.per_order.size(), 3u);
    for (int k = 0; k <= 2; ++k) EXPECT_NEAR(rep.per_order[k], per[k], 1e-12 * per[k]) << "k=" << k;
    EXPECT_NEAR(rep.value, *std::max_element(per.begin(), per.end()), 1e-12);
    EXPECT_EQ(order(rep.argmax_kappa), static_cast<int>(std::max_element(per.begin(), per.end()) - per.begin()));
}

TEST(Seminorm, HomogeneousAndSubadditive) {
    const SampledSymbol f = gauss();
    const SampledSymbol h = sample([](auto x) { return std::exp(cd(-0.5 * (x[0] * x[0] + x[1] * x[1]), x[0])); }, grid);
    for (const SeminormSpec& s : {SeminormSpec{0.0, 1.0, 0.5, 4}, SeminormSpec{-2.0, 4.0, 1.0, 6}}) {
        const double nf = seminorm(f, s).value, nh = seminorm(h, s).value;
        EXPECT_NEAR(seminorm(f.scaled(cd(0.0, -3.0)), s).value, 3.0 * nf, 1e-13 * nf);
        EXPECT_LE(seminorm(f + h, s).value, (nf + nh) * (1.0 + 1e-14));
    }
}

TEST(Seminorm, NegativeWeightLowersTheValue) {
    const SampledSymbol f = sample([](auto x) { return std::exp(-0.3 * ((x[0] - 2) * (x[0] - 2) + x[1] * x[1])); }, grid);
    EXPECT_LT(seminorm(f, {-1.0, 1.0, 0.5, 3}).value, seminorm(f, {0.0, 1.0, 0.5, 3}).value);
}

TEST(MultiplierProfile, PolynomialAndExponentialStayFinite) {
    const SymplecticForm form = make_standard_form(1, 1.0);
    const SampledSymbol g = gauss();
    const std::vector<SeminormSpec> ladder = {{-1.0, 1.0, 0.5, 6}, {-2.0, 4.0, 0.5, 6}};
    const SampledSymbol x1 = sample([](auto x) { return x[0]; }, grid);
    const SampledSymbol ex = sample([](auto x) { return std::exp(cd(0.0, x[0] + 0.5 * x[1])); }, grid);
    for (const auto& v : {Functional::regular(x1, 1.0), Functional::regular(ex, 0.0)})
        for (const auto& row : multiplier_profile(v, g, form, ladder)) {
            EXPECT_FALSE(row.blowup) << row.error;
            EXPECT_TRUE(std::isfinite(row.report.value));
            EXPECT_GT(row.report.value, 0.0);
        }
    const auto unit = multiplier_profile(Functional::delta(Vec::Zero(2)), g, form, ladder);
    for (const auto& row : unit) EXPECT_EQ(row.report.value, seminorm(g, row.spec).value);
}

TEST(MultiplierProfile, SpectralBlowupIsFlaggedNotThrown) {
    const SymplecticForm form = make_standard_form(1, 1.0);
    const SampledSymbol sharp =
        sample([](auto x) { return std::exp(-(x[0] * x[0] + x[1] * x[1])) * std::cos(12.0 * x[0]); }, grid);
    const auto rows = multiplier_profile(Functional::delta(Vec::Zero(2)), sharp, form, {{0.0, 1.0, 0.5, 12}});
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_TRUE(rows[0].blowup);
    EXPECT_FALSE(rows[0].error.empty());
}

TEST(Mollifier, HasUnitMassAndValidates) {
    EXPECT_NEAR(quadrature(make_mollifier(grid)).real(), 1.0, 1e-12);
    EXPECT_NEAR(quadrature(make_mollifier(grid, 1.0 / 8.0)).real(), 1.0, 1e-12);
    EXPECT_THROW(make_mollifier(grid, 0.0), Error);
}

TEST(ExtensionPairing, RegularMatchesClosedFormIntegral) {
    // u = exp(-|x|^2 + 0.4 x1), h = exp(-0.25 |x|^2 + i 0.3 x2)
    const SampledSymbol w = sample([](auto x) { return std::exp(-(x[0] * x[0] + x[1] * x[1]) + 0.4 * x[0]); }, grid);
    const SampledSymbol h = sample([](auto x) { return std::exp(cd(-0.25 * (x[0] * x[0] + x[1] * x[1]), 0.3 * x[1])); }, grid, 1.0);
    Eigen::VectorXcd b(2);
    b << 0.4, cd(0.0, 0.3);
    const cd want = oracle::gaussian_integral(1.25 * Eigen::MatrixXd::Identity(2, 2), b);
    const Functional u = Functional::regular(w, 0.0);
    for (double width : {1.0 / 16.0, 1.0 / 8.0})
        EXPECT_LT(std::abs(extension_pairing(u, h, make_mollifier(grid, width)) - want) / std::abs(want), 1e-10);
}

TEST(ExtensionPairing, DeltaReadsTheWeight) {
    const SampledSymbol h = sample([](auto x) { return std::exp(-0.1 * (x[0] * x[0] + x[1] * x[1])); }, grid, 1.0);
    Vec a(2);
    a << 0.5, -0.75;
    const cd got = extension_pairing(Functional::delta(a), h, make_mollifier(grid));
    EXPECT_LT(std::abs(got - std::exp(-0.1 * a.squaredNorm())), 1e-10);
}

TEST(ExtensionPairing, RejectsUnnormalizedMollifier) {
    const SampledSymbol h = gauss();
    try {
        extension_pairing(Functional::delta(Vec::Zero(2)), h, make_mollifier(grid).scaled(2.0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NormalizationError);
    }
}
