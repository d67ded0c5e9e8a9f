#include <gtest/gtest.h>

#include "moyalkit/moyal.hpp"
#include "moyalkit/oracle.hpp"
#include "oracles.hpp"

using namespace moyalkit;

namespace {

const PhaseGrid grid = PhaseGrid::uniform(2, 64, 8.0);

// exp(-a |x - c|^2 + i k.x), a = 1/3: wide enough for the derivative series,
// narrow enough for the decay check
GaussianSymbol wide(double cx, double cy, double kx, double ky, double chirp = 0.0) {
    Vec c(2);
    c << cx, cy;
    GaussianSymbol g = GaussianSymbol::isotropic(c, std::sqrt(3.0));
    CMat a = g.A();
    a(0, 0) += cd(0.0, chirp);
    CVec b = g.b();
    b[0] += cd(0.0, kx);
    b[1] += cd(0.0, ky);
    return {a, b, g.c()};
}

const GaussianSymbol g1 = wide(0.1, -0.05, 0.05, 0.0, 0.02);
const GaussianSymbol g2 = wide(-0.1, 0.05, 0.0, -0.05);

double error_vs_oracle(const SampledSymbol& got, const SymplecticForm& form) {
    return sup_relative_error(got, gaussian_sample(gaussian_star(g1, g2, form), grid, 1.0));
}

}  // namespace

TEST(StarRoutes, FourierAndIntegralMatchOracle) {
    for (double hbar : {1.0, 0.5}) {
        const SymplecticForm form = make_standard_form(1, hbar);
        const SampledSymbol f1 = gaussian_sample(g1, grid), f2 = gaussian_sample(g2, grid);
        const SampledSymbol sf = star_via_fourier(f1, f2, form);
        EXPECT_EQ(sf.method(), "fourier");
        EXPECT_TRUE(sf.warnings().empty());
        EXPECT_TRUE(f1.decay_checked() && f2.decay_checked());
        // the boundary still carries ~1e-9 of the peak, which bounds the agreement
        EXPECT_LT(error_vs_oracle(sf, form), 1e-10) << "hbar=" << hbar;
        EXPECT_LT(error_vs_oracle(star_via_integral(f1, f2, form), form), 1e-10) << "hbar=" << hbar;
    }
}

TEST(StarRoutes, XiFormAndBridgeMatchOracle) {
    const SymplecticForm form = make_standard_form(1, 1.0);
    const SampledSymbol f1 = gaussian_sample(g1, grid), f2 = gaussian_sample(g2, grid);
    EXPECT_LT(error_vs_oracle(star_via_integral_xi(f1, f2, form), form), 1e-8);
    const SampledSymbol left = star_via_bridge(f1, f2, form, Side::left);
    const SampledSymbol right = star_via_bridge(f1, f2, form, Side::right);
    EXPECT_EQ(left.method(), "bridge_left");
    EXPECT_EQ(right.method(), "bridge_right");
    EXPECT_LT(error_vs_oracle(left, form), 1e-8);
    EXPECT_LT(error_vs_oracle(right, form), 1e-8);
}

TEST(StarRoutes, SeriesMatchesOracleAtOrderTwelve) {
    const SymplecticForm form = make_standard_form(1, 1.0);
    const SeriesReport rep = star_via_series(gaussian_sample(g1, grid), gaussian_sample(g2, grid), form, 12);
    EXPECT_EQ(rep.order_reached, 12);
    EXPECT_EQ(rep.term_norms.size(), 13u);
    EXPECT_EQ(rep.method1, DerivativeMethod::spectral);
    EXPECT_EQ(rep.method2, DerivativeMethod::spectral);
    EXPECT_TRUE(rep.converged);
    EXPECT_LT(error_vs_oracle(rep.partial, form), 1e-6);
}

TEST(StarRoutes, SeriesTerminatesOnPolynomials) {
    for (double hbar : {1.0, 0.3}) {
        const SymplecticForm form = make_standard_form(1, hbar);
        const SampledSymbol q = sample([](auto x) { return x[0]; }, grid);
        const SampledSymbol p = sample([](auto x) { return x[1]; }, grid);
        const SampledSymbol qq = q * q, pp = p * p;
        const SeriesReport qp = star_via_series(q, p, form, 3);
        const SeriesReport pq = star_via_series(p, q, form, 3);
        const SeriesReport q2p2 = star_via_series(qq, pp, form, 4);
        EXPECT_EQ(qp.method1, DerivativeMethod::finite_difference);
        double e1 = 0.0, e2 = 0.0, e3 = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const Vec x = grid.node(i);
            e1 = std::max(e1, std::abs(qp.partial[i] - oracle::q_star_p(x[0], x[1], hbar)));
            e2 = std::max(e2, std::abs(pq.partial[i] - oracle::p_star_q(x[0], x[1], hbar)));
            e3 = std::max(e3, std::abs(q2p2.partial[i] - oracle::qq_star_pp(x[0], x[1], hbar)));
        }
        EXPECT_LT(e1, 1e-10);
        EXPECT_LT(e2, 1e-10);
        EXPECT_LT(e3, 1e-9 * 4096.0);
        EXPECT_LT(q2p2.term_norms.back(), 1e-6);
    }
}

TEST(StarRoutes, GroundStateIdempotentOnFourierAndIntegralRoutes) {
    const SymplecticForm form = make_standard_form(1, 1.0);
    const SampledSymbol f0 = sample([](auto x) { return 2.0 * std::exp(-(x[0] * x[0] + x[1] * x[1])); }, grid);
    EXPECT_LT(sup_relative_error(star_via_fourier(f0, f0, form), f0), 1e-12);
    EXPECT_LT(sup_relative_error(star_via_integral(f0, f0, form), f0), 1e-12);
}

// The derivative series of f0 * f0 evaluates 1/(1+u) at u = 1 term by term:
// the odd terms vanish and the even ones keep the size of f0 * f0.
TEST(StarRoutes, GroundStateSeriesDoesNotConverge) {
    const SymplecticForm form = make_standard_form(1, 1.0);
    const SampledSymbol f0 = sample([](auto x) { return 2.0 * std::exp(-(x[0] * x[0] + x[1] * x[1])); }, grid);
    const SeriesReport rep = star_via_series(f0, f0, form, 8);
    EXPECT_FALSE(rep.converged);
    for (int n = 0; n <= 8; n += 2) EXPECT_NEAR(rep.term_norms[n], 4.0, 1e-8) << "n=" << n;
    for (int n = 1; n <= 8; n += 2) EXPECT_LT(rep.term_norms[n], 1e-10) << "n=" << n;
}

TEST(StarRoutes, RejectsBadArguments) {
    const SampledSymbol f = gaussian_sample(g1, grid);
    const SymplecticForm form = make_standard_form(1, 1.0);
    EXPECT_THROW(star_via_series(f, f, form, 25), Error);
    EXPECT_THROW(star_via_series(f, f, form, -1), Error);
    EXPECT_THROW(star_via_fourier(f, gaussian_sample(g1, PhaseGrid::uniform(2, 32, 8.0)), form), Error);
    const Functional d0 = Functional::delta(Vec::Zero(2));
    EXPECT_THROW(star_via_bridge(d0, d0, form), Error);
}

TEST(StarRoutes, FlagsUnresolvedSpectrum) {
    const SymplecticForm form = make_standard_form(1, 1.0);
    const SampledSymbol sharp = sample([](auto x) { return std::exp(-40.0 * (x[0] * x[0] + x[1] * x[1])); }, grid);
    const SampledSymbol out = star_via_fourier(sharp, sharp, form);
    ASSERT_FALSE(out.warnings().empty());
    EXPECT_EQ(out.warnings().front(), warning::resampling_accuracy_loss);
}

TEST(Bridge, DeltaOperandsMatchDualityPairing) {
    const SymplecticForm form = make_standard_form(1, 1.0);
    const SampledSymbol f = gaussian_sample(g1, grid), phi = gaussian_sample(g2, grid);
    Vec a(2);
    a << 0.5, -0.25;
    const Functional da = Functional::delta(a);
    const SampledSymbol fd = star_via_bridge(f, da, form);
    const SampledSymbol df = star_via_bridge(da, f, form);
    const cd left = star_duality_pair(da, phi, f, form, Side::left);
    const cd right = star_duality_pair(da, phi, f, form, Side::right);
    EXPECT_LT(std::abs(quadrature(fd * phi) - left) / std::abs(left), 1e-8);
    EXPECT_LT(std::abs(quadrature(df * phi) - right) / std::abs(right), 1e-8);
}

TEST(StarRoutes, IntegralOfProductIsTracial) {
    // int f * g = int f g for every form
    const SymplecticForm form = make_standard_form(1, 0.8);
    const SampledSymbol f = gaussian_sample(g1, grid), g = gaussian_sample(g2, grid);
    const cd want = quadrature(f * g);
    EXPECT_LT(std::abs(quadrature(star_via_fourier(f, g, form)) - want) / std::abs(want), 1e-13);
    EXPECT_LT(std::abs(quadrature(star_via_integral(g, f, form)) - want) / std::abs(want), 1e-13);
}

TEST(SeriesHelpers, RatiosDecayAndGrowth) {
    const auto r = successive_ratios({1.0, 0.5, 0.0, 0.0, 2.0});
    ASSERT_EQ(r.size(), 4u);
    EXPECT_EQ(r[0], 0.5);
    EXPECT_EQ(r[1], 0.0);
    EXPECT_EQ(r[2], 0.0);
    EXPECT_TRUE(std::isinf(r[3]));
    EXPECT_TRUE(geometric_decay({1.0, 0.5, 0.25, 0.125, 0.0625}));
    // vanishing odd terms do not spoil the verdict
    EXPECT_TRUE(geometric_decay({1.0, 0.0, 0.1, 0.0, 0.01, 0.0}));
    EXPECT_FALSE(geometric_decay({4.0, 0.0, 4.0, 0.0, 4.0}));
    EXPECT_FALSE(geometric_decay({1.0, 0.5, 0.25, 0.25, 0.25}));
    EXPECT_FALSE(geometric_decay({1.0, 0.5, 0.25, 0.125}));
    EXPECT_NEAR(mean_growth_rate({9.0, 1.0, 2.0, 4.0}), 2.0, 1e-15);
    EXPECT_EQ(mean_growth_rate({1.0, 1.0}), 0.0);
}

TEST(ConvergenceProbe, PlainConvergesChirpGrowsTrendMonotone) {
    const SymplecticForm form = make_standard_form(1, 1.0);
    const PhaseGrid fine = PhaseGrid::uniform(2, 128, 8.0);
    const ChirpFamily family;
    EXPECT_EQ(family.chirp(0.5), 0.0);
    EXPECT_GT(family.chirp(1.0), 0.0);
    const auto rows = series_convergence_probe(family, {0.25, 0.75, 1.0}, 12, form, fine);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_TRUE(rows[0].converged);
    EXPECT_FALSE(rows[0].terms_grow);
    EXPECT_TRUE(rows[2].terms_grow);
    EXPECT_LE(rows[0].growth_rate, rows[1].growth_rate);
    EXPECT_LE(rows[1].growth_rate, rows[2].growth_rate);
    EXPECT_THROW(series_convergence_probe(family, {0.0}, 4, form, fine), Error);
}
