#pragma once

// Weighted derivative seminorms
//   |f|_{N,B} = sup_{x, |kappa| <= K} (1 + |x|)^N |d^kappa f(x)| / (B^|kappa| kappa^{beta kappa}),
// with kappa^{beta kappa} = prod_i kappa_i^{beta kappa_i} and 0^0 = 1. N >= 0 is
// the decay norm of the test spaces; N < 0 gives the growth-weighted norm of
// the multiplier spaces. Also the mollified extension of a functional to
// slowly growing functions.

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "derivatives.hpp"
#include "error.hpp"
#include "grid.hpp"
#include "parallel.hpp"
#include "twisted.hpp"

namespace moyalkit {

inline constexpr int max_seminorm_order = 12;
inline constexpr double mollifier_normalization_tol = 1e-8;

struct SeminormSpec {
    double N = 0.0;
    double B = 1.0;
    double beta = 0.5;
    int K = 0;

    void validate() const {
        if (!(B > 0.0)) throw Error(ErrorKind::InvalidArgument, "seminorm B must be positive");
        if (!(beta > 0.0)) throw Error(ErrorKind::InvalidArgument, "seminorm beta must be positive");
        if (K < 0 || K > max_seminorm_order) throw Error(ErrorKind::InvalidArgument, "derivative cutoff must lie in [0, 12]");
    }
};

struct SeminormReport {
    double value = 0.0;
    std::size_t argmax_node = 0;
    MultiIndex argmax_kappa;
    std::vector<double> per_order;  // sup over |kappa| == k, k = 0..K
};

namespace detail {

inline void enumerate_order(int d, int total, MultiIndex& cur, int axis, std::vector<MultiIndex>& out) {
    if (axis == d - 1) {
        cur[axis] = total;
        out.push_back(cur);
        return;
    }
    for (int k = total; k >= 0; --k) {
        cur[axis] = k;
        enumerate_order(d, total - k, cur, axis + 1, out);
    }
}

}  // namespace detail

// All multi-indices of length d and order exactly k, lexicographically descending.
inline std::vector<MultiIndex> multi_indices(int d, int k) {
    std::vector<MultiIndex> out;
    MultiIndex cur(d, 0);
    detail::enumerate_order(d, k, cur, 0, out);
    return out;
}

// log of B^|kappa| kappa^{beta kappa}
inline double log_denominator(const MultiIndex& kappa, double B, double beta) {
    double acc = order(kappa) * std::log(B);
    for (int k : kappa)
        if (k > 0) acc += beta * k * std::log(static_cast<double>(k));
    return acc;
}

inline SeminormReport seminorm(const SampledSymbol& f, const SeminormSpec& spec) {
    spec.validate();
    const PhaseGrid& g = f.grid();
    std::vector<double> weight(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) weight[i] = std::pow(1.0 + g.node(i).norm(), spec.N);

    DerivativeCache cache = DerivativeCache::for_symbol(f);
    SeminormReport rep;
    rep.argmax_kappa = MultiIndex(g.dim(), 0);
    rep.argmax_node = g.origin_index();
    for (int k = 0; k <= spec.K; ++k) {
        double best = 0.0;
        for (const MultiIndex& kappa : multi_indices(g.dim(), k)) {
            const SampledSymbol& dk = cache.get(kappa);
            const double scale = std::exp(-log_denominator(kappa, spec.B, spec.beta));
            for (std::size_t i = 0; i < g.size(); ++i) {
                const double v = weight[i] * std::abs(dk[i]) * scale;
                if (v > best) best = v;
                // strict > keeps the first maximizer in a fixed scan order
                if (v > rep.value) {
                    rep.value = v;
                    rep.argmax_node = i;
                    rep.argmax_kappa = kappa;
                }
            }
        }
        rep.per_order.push_back(best);
    }
    return rep;
}

struct ProfileRow {
    SeminormSpec spec;
    SeminormReport report;
    bool blowup = false;
    std::string error;
};

// Seminorms of v # g across a ladder of specs. A row is flagged when the
// derivatives alias (SpectralBlowup) or the value is not finite.
inline std::vector<ProfileRow> multiplier_profile(const Functional& v, const SampledSymbol& g, const SkewForm& form,
                                                  const std::vector<SeminormSpec>& specs) {
    const SampledSymbol prod = convolve_functional(v, g, form, Side::left);
    std::vector<ProfileRow> rows;
    for (const auto& spec : specs) {
        ProfileRow row;
        row.spec = spec;
        try {
            row.report = seminorm(prod, spec);
            row.blowup = !std::isfinite(row.report.value);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::SpectralBlowup) throw;
            row.blowup = true;
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

// Normalized Gaussian prod_i exp(-x_i^2 / w_i^2) / (sqrt(pi) w_i), w_i = L_i * width_fraction.
inline SampledSymbol make_mollifier(const PhaseGrid& grid, double width_fraction = 1.0 / 16.0) {
    if (!(width_fraction > 0.0)) throw Error(ErrorKind::InvalidArgument, "mollifier width must be positive");
    return sample(
        [&](std::span<const double> x) {
            double v = 1.0;
            for (int a = 0; a < grid.dim(); ++a) {
                const double w = width_fraction * grid.half_extent(a);
                v *= std::exp(-x[a] * x[a] / (w * w)) / (std::sqrt(std::numbers::pi) * w);
            }
            return v;
        },
        grid);
}

// <u, h> = sum_xi (u * h_xi)(xi) prod h_i, h_xi(x) = h(xi - x) f0(x), with *
// the ordinary convolution. Since (u * h_xi)(xi) = <u_y, h(y) f0(xi - y)>, this
// is the phase-free product of the functional y -> h(y) u(y) with f0.
inline cd extension_pairing(const Functional& u, const SampledSymbol& h, const SampledSymbol& f0) {
    require_same_grid(h.grid(), f0.grid(), "extension pairing on different grids");
    const cd mass = quadrature(f0);
    if (std::abs(mass - 1.0) > mollifier_normalization_tol)
        throw Error(ErrorKind::NormalizationError, "mollifier integral differs from 1");
    const SampledSymbol local = convolve_functional(u.weighted(h), f0, SkewForm::zero(h.dim()), Side::left);
    return quadrature(local);
}

}  // namespace moyalkit
