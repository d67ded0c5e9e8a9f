#pragma once

// The Moyal star product by independent routes:
//   fourier   F^{-1}[(2 pi)^{-d} fhat1 # fhat2]          (twisted convolution on the Fourier side)
//   integral  (2 pi)^{-d} int fhat1(t) f2(x + M t / 2) e^{i t.x} dt
//   xi-form   1/(pi^d det M) int (F_M f1)(xi) f2(x - xi) e^{-2i x.M^{-1} xi} dxi
//   series    sum_n (i/2)^n / n! M^{m1 n1}..M^{mn nn} d_{m1..mn} f1 d_{n1..nn} f2
//   bridge    f * v = c (F_M f) #' v,  v * f = c v #' (Fbar_M f),  #' at -4 M^{-1}
// and the duality extension <u, g * f>.

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "derivatives.hpp"
#include "error.hpp"
#include "fourier.hpp"
#include "grid.hpp"
#include "parallel.hpp"
#include "symplectic.hpp"
#include "twisted.hpp"

namespace moyalkit {

namespace detail {

inline double two_pi_pow(int d) { return std::pow(2.0 * std::numbers::pi, d); }

// Reattach samples to the caller's grid object (the reciprocal of the
// reciprocal matches it only up to roundoff).
inline SampledSymbol on_grid(const PhaseGrid& g, const SampledSymbol& f) { return {g, f.values()}; }

inline void flag_spectral_tail(SampledSymbol& out, const SampledSymbol& fhat) {
    if (spectral_tail(fhat) > resampling_residual_tol) out.add_warning(std::string(warning::resampling_accuracy_loss));
}

}  // namespace detail

inline SampledSymbol star_via_fourier(const SampledSymbol& f1, const SampledSymbol& f2, const SkewForm& form) {
    require_same_grid(f1.grid(), f2.grid(), "star product of symbols on different grids");
    const SampledSymbol h1 = fourier(f1);
    const SampledSymbol h2 = fourier(f2);
    const SampledSymbol conv = twisted_convolution(h1, h2, form).scaled(1.0 / detail::two_pi_pow(f1.dim()));
    SampledSymbol out = detail::on_grid(f1.grid(), inverse_fourier(conv));
    out.with_method("fourier");
    detail::flag_spectral_tail(out, h1);
    detail::flag_spectral_tail(out, h2);
    return out;
}

// Sum over reciprocal nodes t of fhat1(t) e^{i t.x} f2(x + M t / 2), with f2
// moved by its band-limited interpolant. Contributions are accumulated in a
// fixed number of t-blocks and reduced in block order, so the result does not
// depend on the thread count.
inline SampledSymbol star_via_integral(const SampledSymbol& f1, const SampledSymbol& f2, const SkewForm& form) {
    require_same_grid(f1.grid(), f2.grid(), "star product of symbols on different grids");
    const PhaseGrid& g = f1.grid();
    const int d = g.dim();
    if (form.dim() != d) throw Error(ErrorKind::DimensionMismatch, "form and grid dimensions differ");
    const SampledSymbol h1 = fourier(f1);
    const PhaseGrid& rg = h1.grid();
    const BandLimited interp(f2);
    const Mat m = form.matrix();

    const double floor = 1e-18 * h1.sup_norm();
    constexpr std::size_t blocks = 64;
    const std::size_t per_block = (rg.size() + blocks - 1) / blocks;
    std::vector<std::vector<cd>> partial(blocks, std::vector<cd>(g.size()));

    parallel_for(blocks, [&](std::size_t b) {
        const std::size_t lo = b * per_block;
        const std::size_t hi = std::min(rg.size(), lo + per_block);
        std::vector<cd>& acc = partial[b];
        std::vector<std::vector<cd>> axis_phase(d);
        for (std::size_t ti = lo; ti < hi; ++ti) {
            const cd weight = h1[ti];
            if (std::abs(weight) <= floor) continue;
            const Vec t = rg.node(ti);
            const auto moved = interp.shifted(0.5 * (m * t));
            for (int a = 0; a < d; ++a) {
                axis_phase[a].resize(g.points(a));
                for (int k = 0; k < g.points(a); ++k) axis_phase[a][k] = detail::unit_phase(t[a] * g.coordinate(a, k));
            }
            for (std::size_t i = 0; i < g.size(); ++i) {
                std::size_t flat = i;
                cd ph = weight;
                for (int a = 0; a < d; ++a) {
                    ph *= axis_phase[a][flat / g.stride(a)];
                    flat %= g.stride(a);
                }
                acc[i] += ph * moved.values[i];
            }
        }
    });

    std::vector<cd> out(g.size());
    for (std::size_t b = 0; b < blocks; ++b)
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += partial[b][i];
    const double scale = rg.cell_volume() / detail::two_pi_pow(d);
    for (cd& v : out) v *= scale;

    SampledSymbol result(g, std::move(out));
    result.with_method("integral");
    if (interp.residual() > resampling_residual_tol) result.add_warning(std::string(warning::resampling_accuracy_loss));
    return result;
}

// Same product from the symplectic-Fourier form of the kernel: sum over grid
// nodes xi of (F_M f1)(xi) f2(x - xi) e^{-2i x.M^{-1} xi}; lattice differences
// keep f2 on the lattice.
inline SampledSymbol star_via_integral_xi(const SampledSymbol& f1, const SampledSymbol& f2, const SymplecticForm& form) {
    require_same_grid(f1.grid(), f2.grid(), "star product of symbols on different grids");
    const PhaseGrid& g = f1.grid();
    const int d = g.dim();
    if (form.dim() != d) throw Error(ErrorKind::DimensionMismatch, "form and grid dimensions differ");
    const SampledSymbol sf = symplectic_fourier(f1, form, false);
    const Mat inv = form.inverse();
    const double c = 1.0 / (std::pow(std::numbers::pi, d) * std::abs(form.determinant()));

    std::vector<cd> out(g.size());
    parallel_for(g.size(), [&](std::size_t xi_flat) {
        const auto xidx = g.multi_index(xi_flat);
        const Vec x = g.node(xi_flat);
        const Vec k = -2.0 * (inv.transpose() * x);  // e^{-2i x.M^{-1} xi} = e^{i k.xi}
        std::vector<std::vector<cd>> phase(d);
        for (int a = 0; a < d; ++a) {
            phase[a].resize(g.points(a));
            for (int j = 0; j < g.points(a); ++j) phase[a][j] = detail::unit_phase(k[a] * g.coordinate(a, j));
        }
        std::vector<int> diff(d);
        cd acc{};
        for (std::size_t j = 0; j < g.size(); ++j) {
            const cd w = sf[j];
            if (w == cd{}) continue;
            std::size_t flat = j;
            cd ph = w;
            bool inside = true;
            for (int a = 0; a < d; ++a) {
                const int jj = static_cast<int>(flat / g.stride(a));
                flat %= g.stride(a);
                diff[a] = xidx[a] - jj + g.points(a) / 2;
                if (diff[a] < 0 || diff[a] >= g.points(a)) inside = false;
                ph *= phase[a][jj];
            }
            if (inside) acc += ph * f2[g.flat_index(diff)];
        }
        out[xi_flat] = c * g.cell_volume() * acc;
    });
    SampledSymbol result(g, std::move(out));
    result.with_method("integral_xi");
    for (const auto& w : sf.warnings()) result.add_warning(w);
    return result;
}

// ---------------------------------------------------------------------------
// Derivative series

struct SeriesReport {
    int order_reached = 0;
    std::vector<double> term_norms;  // sup-norm of each term, entry 0 is |f1 f2|
    std::vector<double> ratios;      // term_norms[n+1] / term_norms[n]
    SampledSymbol partial;
    bool converged = false;
    DerivativeMethod method1 = DerivativeMethod::spectral;
    DerivativeMethod method2 = DerivativeMethod::spectral;
};

inline constexpr int max_series_order = 24;
inline constexpr double geometric_ratio_bound = 0.9;

// 0 when both norms vanish, +inf when only the denominator does.
inline std::vector<double> successive_ratios(const std::vector<double>& norms) {
    std::vector<double> r;
    for (std::size_t n = 0; n + 1 < norms.size(); ++n) {
        if (norms[n] == 0.0)
            r.push_back(norms[n + 1] == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
        else
            r.push_back(norms[n + 1] / norms[n]);
    }
    return r;
}

// Geometric decay at rate 0.9 per order, measured over two orders so that
// series whose odd terms vanish (symmetric pairs) are judged on their even
// terms: t_n <= 0.81 t_{n-2} for each of the last three n.
inline bool geometric_decay(const std::vector<double>& norms) {
    if (norms.size() < 5) return false;
    const double two_step = geometric_ratio_bound * geometric_ratio_bound;
    for (std::size_t n = norms.size() - 3; n < norms.size(); ++n)
        if (!(norms[n] <= two_step * norms[n - 2])) return false;
    return true;
}

namespace detail {

// Coefficients of (sum_{mu,nu} M_{mu nu} X_mu Y_nu)^n as a sparse map from the
// exponent pair (alpha, beta) to its coefficient. Canonical forms keep it sparse.
using BiIndex = std::pair<MultiIndex, MultiIndex>;

inline std::map<BiIndex, double> next_power(const std::map<BiIndex, double>& prev, const Mat& m) {
    std::map<BiIndex, double> out;
    for (const auto& [key, coeff] : prev)
        for (int mu = 0; mu < m.rows(); ++mu)
            for (int nu = 0; nu < m.cols(); ++nu) {
                if (m(mu, nu) == 0.0) continue;
                BiIndex k = key;
                ++k.first[mu];
                ++k.second[nu];
                out[k] += coeff * m(mu, nu);
            }
    for (auto it = out.begin(); it != out.end();) it = it->second == 0.0 ? out.erase(it) : std::next(it);
    return out;
}

}  // namespace detail

// Partial sums up to max_order. Box-decayed symbols take spectral derivatives;
// others (coordinates, constants) take finite-difference stencils.
inline SeriesReport star_via_series(const SampledSymbol& f1, const SampledSymbol& f2, const SkewForm& form,
                                    int max_order) {
    require_same_grid(f1.grid(), f2.grid(), "star product of symbols on different grids");
    if (max_order < 0 || max_order > max_series_order)
        throw Error(ErrorKind::InvalidArgument, "series order must lie in [0, 24]");
    const PhaseGrid& g = f1.grid();
    const int d = g.dim();
    if (form.dim() != d) throw Error(ErrorKind::DimensionMismatch, "form and grid dimensions differ");
    const Mat m = form.matrix();

    DerivativeCache d1 = DerivativeCache::for_symbol(f1);
    DerivativeCache d2 = DerivativeCache::for_symbol(f2);

    SeriesReport report;
    report.method1 = d1.method();
    report.method2 = d2.method();
    std::vector<cd> partial(g.size());
    std::map<detail::BiIndex, double> poly{{{MultiIndex(d, 0), MultiIndex(d, 0)}, 1.0}};
    cd prefactor{1.0, 0.0};
    for (int n = 0; n <= max_order; ++n) {
        if (n > 0) {
            poly = detail::next_power(poly, m);
            prefactor *= cd(0.0, 0.5) / static_cast<double>(n);
        }
        std::vector<cd> term(g.size());
        for (const auto& [key, coeff] : poly) {
            const SampledSymbol& a = d1.get(key.first);
            const SampledSymbol& b = d2.get(key.second);
            const cd w = prefactor * coeff;
            for (std::size_t i = 0; i < term.size(); ++i) term[i] += w * a[i] * b[i];
        }
        double norm = 0.0;
        for (std::size_t i = 0; i < term.size(); ++i) {
            partial[i] += term[i];
            norm = std::max(norm, std::abs(term[i]));
        }
        report.term_norms.push_back(norm);
        report.order_reached = n;
    }
    report.ratios = successive_ratios(report.term_norms);
    report.converged = geometric_decay(report.term_norms);
    report.partial = SampledSymbol(g, std::move(partial));
    report.partial.with_method("series");
    return report;
}

// ---------------------------------------------------------------------------
// Bridge to twisted convolution at the dual deformation

using StarOperand = std::variant<SampledSymbol, Functional>;

// Which side carries the symplectic Fourier transform: left is
// f * v = c (F_M f) #' v, right is v * f = c v #' (Fbar_M f).
inline SampledSymbol star_via_bridge(const StarOperand& x1, const StarOperand& x2, const SymplecticForm& form,
                                     Side bridge_side = Side::left) {
    const bool fn1 = std::holds_alternative<Functional>(x1);
    const bool fn2 = std::holds_alternative<Functional>(x2);
    if (fn1 && fn2) throw Error(ErrorKind::InvalidArgument, "at most one star operand may be a functional");
    if (fn1) bridge_side = Side::right;
    if (fn2) bridge_side = Side::left;

    const int d = form.dim();
    const SymplecticForm dual = dual_deformation(form);
    const double c = 1.0 / (std::pow(std::numbers::pi, d) * std::abs(form.determinant()));

    SampledSymbol out;
    if (bridge_side == Side::left) {
        const auto& f = std::get<SampledSymbol>(x1);
        const SampledSymbol ff = symplectic_fourier(f, form, false);
        if (fn2)
            out = convolve_functional(std::get<Functional>(x2), ff, dual, Side::right);
        else
            out = twisted_convolution(ff, std::get<SampledSymbol>(x2), dual);
        for (const auto& w : ff.warnings()) out.add_warning(w);
    } else {
        const auto& f = std::get<SampledSymbol>(x2);
        const SampledSymbol fb = symplectic_fourier(f, form, true);
        if (fn1)
            out = convolve_functional(std::get<Functional>(x1), fb, dual, Side::left);
        else
            out = twisted_convolution(std::get<SampledSymbol>(x1), fb, dual);
        for (const auto& w : fb.warnings()) out.add_warning(w);
    }
    SampledSymbol result = out.scaled(c);
    result.with_method(bridge_side == Side::left ? "bridge_left" : "bridge_right");
    for (const auto& w : out.warnings()) result.add_warning(w);
    return result;
}

// left: <u, g * f>; right: <u, f * g>, products by the Fourier route.
inline cd star_duality_pair(const Functional& u, const SampledSymbol& g, const SampledSymbol& f, const SkewForm& form,
                            Side side) {
    const SampledSymbol prod = side == Side::left ? star_via_fourier(g, f, form) : star_via_fourier(f, g, form);
    return u.pair(prod);
}

// ---------------------------------------------------------------------------
// Series convergence probe

// Test pair x -> exp(-a|x - x_k|^2 + i c |x - x_k|^2) at two offset centers.
// Larger chirp c sharpens the frequency content; c = 0 gives plain Gaussians.
struct ChirpFamily {
    double width_coeff = 1.0 / 3.0;  // a
    double chirp_per_beta = 3.0;     // c = chirp_per_beta * max(0, beta - 1/2)
    double offset = 0.3;

    double chirp(double beta) const { return chirp_per_beta * std::max(0.0, beta - 0.5); }

    std::pair<SampledSymbol, SampledSymbol> make_pair(double beta, const PhaseGrid& grid) const {
        const double c = chirp(beta);
        auto make = [&](double shift) {
            return sample(
                [&](std::span<const double> x) {
                    double r2 = 0.0;
                    for (std::size_t i = 0; i < x.size(); ++i) {
                        const double y = x[i] - (i % 2 == 0 ? shift : -shift);
                        r2 += y * y;
                    }
                    return std::exp(cd(-width_coeff * r2, c * r2));
                },
                grid);
        };
        return {make(offset), make(-offset)};
    }
};

// Geometric mean of the ratios from order 1 to the last order; order 0 (the
// pointwise product) is left out since its size is unrelated to the deformation.
inline double mean_growth_rate(const std::vector<double>& norms) {
    if (norms.size() < 3) return 0.0;
    const double first = norms[1], last = norms.back();
    if (first == 0.0) return last == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::pow(last / first, 1.0 / static_cast<double>(norms.size() - 2));
}

struct ConvergenceRow {
    double beta = 0.0;
    double chirp = 0.0;
    std::vector<double> term_norms;
    std::vector<double> ratios;
    double growth_rate = 0.0;  // (t_last / t_1)^{1/(n-1)}: mean ratio past the product term
    bool converged = false;
    bool terms_grow = false;  // growth_rate above 1, or the derivatives blew up
    std::string error;        // SpectralBlowup and the like, recorded per entry
};

inline std::vector<ConvergenceRow> series_convergence_probe(const ChirpFamily& family, const std::vector<double>& betas,
                                                            int orders, const SkewForm& form, const PhaseGrid& grid) {
    std::vector<ConvergenceRow> rows;
    for (double beta : betas) {
        if (!(beta > 0.0)) throw Error(ErrorKind::InvalidArgument, "beta must be positive");
        ConvergenceRow row;
        row.beta = beta;
        row.chirp = family.chirp(beta);
        try {
            const auto [f1, f2] = family.make_pair(beta, grid);
            const SeriesReport rep = star_via_series(f1, f2, form, orders);
            row.term_norms = rep.term_norms;
            row.ratios = rep.ratios;
            row.converged = rep.converged;
            row.growth_rate = mean_growth_rate(rep.term_norms);
            row.terms_grow = row.growth_rate > 1.0;
        } catch (const Error& e) {
            row.error = e.what();
            if (e.kind() != ErrorKind::SpectralBlowup) throw;
            row.growth_rate = std::numeric_limits<double>::infinity();
            row.terms_grow = true;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace moyalkit
