#pragma once

// Fourier transforms in the convention fhat(s) = int f(x) e^{-i x.s} dx,
// its inverse (2 pi)^{-d} int fhat(s) e^{+i x.s} ds, band-limited evaluation
// of sampled symbols off the lattice, and the symplectic transforms
//   (F_M f)(xi)    = int f(x) e^{+2i x.M^{-1} xi} dx,
//   (Fbar_M f)(xi) = int f(x) e^{-2i x.M^{-1} xi} dx.
//
// On a grid with nodes x_k = -L + k h and its reciprocal s_m = -S + m pi/L,
// S = pi N / (2L), the kernel factorizes exactly as
//   e^{-i x_k s_m} = (-1)^{N/2} (-1)^k (-1)^m e^{-2 pi i k m / N},
// so the quadrature sums are plain DFTs wrapped in sign alternations.

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "error.hpp"
#include "fft.hpp"
#include "grid.hpp"
#include "parallel.hpp"
#include "symplectic.hpp"

namespace moyalkit {

inline constexpr double resampling_residual_tol = 1e-6;

namespace detail {

inline bool odd(int k) { return (k & 1) != 0; }

// Multiplies each node by (-1)^{sum of its indices}.
inline void alternate_signs(std::vector<cd>& v, const PhaseGrid& g) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::size_t flat = i;
        int parity = 0;
        for (int a = 0; a < g.dim(); ++a) {
            parity += static_cast<int>(flat / g.stride(a));
            flat %= g.stride(a);
        }
        if (odd(parity)) v[i] = -v[i];
    }
}

inline double half_count_sign(const PhaseGrid& g) {
    int parity = 0;
    for (int n : g.points()) parity += n / 2;
    return odd(parity) ? -1.0 : 1.0;
}

inline std::vector<cd> lattice_transform(std::vector<cd> v, const PhaseGrid& in, fft::Direction dir, double scale) {
    alternate_signs(v, in);
    fft::transform(v, in.points(), dir);
    alternate_signs(v, in);
    const double s = scale * half_count_sign(in);
    for (cd& x : v) x *= s;
    return v;
}

}  // namespace detail

inline SampledSymbol fourier(const SampledSymbol& f) {
    const PhaseGrid out = f.grid().reciprocal();
    auto v = detail::lattice_transform(f.values(), f.grid(), fft::Direction::forward, f.grid().cell_volume());
    return {out, std::move(v)};
}

inline SampledSymbol inverse_fourier(const SampledSymbol& fhat) {
    const PhaseGrid out = fhat.grid().reciprocal();
    const double scale = fhat.grid().cell_volume() / std::pow(2.0 * std::numbers::pi, fhat.dim());
    auto v = detail::lattice_transform(fhat.values(), fhat.grid(), fft::Direction::backward, scale);
    return {out, std::move(v)};
}

// sum_k v_k prod_a phase[a][k_a], contracted axis by axis from the last one
// (fixed order).
inline cd contract(const std::vector<cd>& values, const PhaseGrid& grid, const std::vector<std::vector<cd>>& phase) {
    std::vector<cd> cur(values);
    std::size_t len = cur.size();
    for (int a = grid.dim() - 1; a >= 0; --a) {
        const int n = grid.points(a);
        const std::size_t outer = len / static_cast<std::size_t>(n);
        std::vector<cd> next(outer);
        for (std::size_t o = 0; o < outer; ++o) {
            cd acc{};
            const cd* row = cur.data() + o * static_cast<std::size_t>(n);
            for (int k = 0; k < n; ++k) acc += row[k] * phase[a][k];
            next[o] = acc;
        }
        cur = std::move(next);
        len = outer;
    }
    return cur[0];
}

// Unweighted sum_k v_k prod_a exp(sign i x_a(k_a) w_a) over all nodes of grid.
inline cd fourier_sum_at(const std::vector<cd>& values, const PhaseGrid& grid, const Vec& w, int sign) {
    std::vector<std::vector<cd>> phase(grid.dim());
    for (int a = 0; a < grid.dim(); ++a) {
        phase[a].resize(grid.points(a));
        for (int k = 0; k < grid.points(a); ++k) {
            const double arg = sign * grid.coordinate(a, k) * w[a];
            phase[a][k] = {std::cos(arg), std::sin(arg)};
        }
    }
    return contract(values, grid, phase);
}

namespace detail {

// Per-axis factors e^{i s_m y_a} of the trigonometric interpolant. The unpaired
// Nyquist mode s_0 = -S is split evenly between -S and +S, giving cos(S y):
// it agrees with e^{-i S y} on the lattice and keeps the interpolant of a
// conjugated (or reflected) symbol the conjugate (or reflection) of the
// original interpolant.
inline std::vector<std::vector<cd>> interpolation_phases(const PhaseGrid& rg, const Vec& y) {
    std::vector<std::vector<cd>> phase(rg.dim());
    for (int a = 0; a < rg.dim(); ++a) {
        phase[a].resize(rg.points(a));
        for (int m = 0; m < rg.points(a); ++m) {
            const double arg = rg.coordinate(a, m) * y[a];
            phase[a][m] = m == 0 ? cd(std::cos(arg), 0.0) : cd(std::cos(arg), std::sin(arg));
        }
    }
    return phase;
}

}  // namespace detail

// max |fhat| on the reciprocal boundary shell relative to its peak: how far the
// sampled symbol is from being band-limited on this grid.
inline double spectral_tail(const SampledSymbol& fhat) {
    const double peak = fhat.sup_norm();
    return peak > 0.0 ? fhat.boundary_max() / peak : 0.0;
}

// Trigonometric (band-limited) interpolant of a sampled symbol.
class BandLimited {
public:
    explicit BandLimited(const SampledSymbol& f) : grid_(f.grid()), source_(f), spectrum_(fourier(f)) {
        weight_ = spectrum_.grid().cell_volume() / std::pow(2.0 * std::numbers::pi, grid_.dim());
    }

    const PhaseGrid& grid() const { return grid_; }
    const SampledSymbol& spectrum() const { return spectrum_; }
    double residual() const { return spectral_tail(spectrum_); }

    // Interpolant at an arbitrary point; zero outside the box.
    cd operator()(const Vec& y) const {
        if (!grid_.contains(std::span<const double>(y.data(), static_cast<std::size_t>(y.size())))) return {};
        return weight_ * contract(spectrum_.values(), spectrum_.grid(), detail::interpolation_phases(spectrum_.grid(), y));
    }

    struct Shifted {
        std::vector<cd> values;
        double dropped_ratio = 0.0;  // largest periodic wrap-in discarded by the box mask, relative to peak
    };

    // Samples of x -> f(x + y) on the grid nodes. Points leaving the box read
    // zero unless periodic, in which case the box is treated as a torus.
    Shifted shifted(const Vec& y, bool periodic = false) const {
        const int d = grid_.dim();
        std::vector<double> frac(d);
        bool lattice = true;
        for (int a = 0; a < d; ++a) {
            frac[a] = y[a] / grid_.spacing(a);
            if (std::abs(frac[a] - std::round(frac[a])) > 1e-12 * std::max(1.0, std::abs(frac[a]))) lattice = false;
        }
        Shifted out;
        out.values.assign(grid_.size(), cd{});
        if (lattice) {
            std::vector<int> off(d), src(d);
            for (int a = 0; a < d; ++a) off[a] = static_cast<int>(std::lround(frac[a]));
            double peak = 0.0, dropped = 0.0;
            for (std::size_t i = 0; i < grid_.size(); ++i) {
                auto idx = grid_.multi_index(i);
                bool inside = true;
                for (int a = 0; a < d; ++a) {
                    const int n = grid_.points(a);
                    src[a] = idx[a] + off[a];
                    if (periodic) src[a] = ((src[a] % n) + n) % n;
                    if (src[a] < 0 || src[a] >= n) inside = false;
                }
                const double mag = std::abs(source_[i]);
                peak = std::max(peak, mag);
                if (inside) out.values[i] = source_[grid_.flat_index(src)];
                // source node i is lost if no destination reads it
                bool read = true;
                if (!periodic)
                    for (int a = 0; a < d; ++a) {
                        const int dst = idx[a] - off[a];
                        if (dst < 0 || dst >= grid_.points(a)) read = false;
                    }
                if (!read) dropped = std::max(dropped, mag);
            }
            out.dropped_ratio = peak > 0.0 ? dropped / peak : 0.0;
            return out;
        }
        const PhaseGrid& rg = spectrum_.grid();
        std::vector<cd> ramp(spectrum_.values());
        const auto axis_phase = detail::interpolation_phases(rg, y);
        for (std::size_t i = 0; i < ramp.size(); ++i) {
            std::size_t flat = i;
            cd ph{1.0, 0.0};
            for (int a = 0; a < d; ++a) {
                ph *= axis_phase[a][flat / rg.stride(a)];
                flat %= rg.stride(a);
            }
            ramp[i] *= ph;
        }
        const SampledSymbol moved = inverse_fourier(SampledSymbol(rg, std::move(ramp)));
        std::vector<std::vector<char>> keep(d);
        for (int a = 0; a < d; ++a) {
            keep[a].resize(grid_.points(a));
            for (int k = 0; k < grid_.points(a); ++k) {
                const double x = grid_.coordinate(a, k) + y[a];
                keep[a][k] = (x >= -grid_.half_extent(a) && x < grid_.half_extent(a)) ? 1 : 0;
            }
        }
        double peak = 0.0, dropped = 0.0;
        for (std::size_t i = 0; i < grid_.size(); ++i) {
            std::size_t flat = i;
            bool inside = true;
            for (int a = 0; a < d; ++a) {
                inside = inside && keep[a][flat / grid_.stride(a)];
                flat %= grid_.stride(a);
            }
            const double mag = std::abs(moved[i]);
            peak = std::max(peak, mag);
            if (inside || periodic)
                out.values[i] = moved[i];
            else
                dropped = std::max(dropped, mag);
        }
        out.dropped_ratio = (peak > 0.0 && !periodic) ? dropped / peak : 0.0;
        return out;
    }

private:
    PhaseGrid grid_;
    SampledSymbol source_;
    SampledSymbol spectrum_;
    double weight_ = 1.0;
};

// Samples of x -> f(x + y). Lattice offsets are exact index moves; others use
// the band-limited interpolant. Out-of-box reads are zero.
inline BandLimited::Shifted shift_samples(const SampledSymbol& f, const Vec& y, bool periodic = false) {
    return BandLimited(f).shifted(y, periodic);
}

// Symplectic Fourier transform on the input grid. When the map
// xi -> -+2 M^{-1} xi sends grid nodes onto reciprocal-lattice nodes the FFT
// values are permuted into place ("fft_lattice"); otherwise, and for nodes
// mapped outside the reciprocal box, the quadrature sum is evaluated directly
// ("direct_quadrature"). Both evaluate the same trapezoid sum.
inline SampledSymbol symplectic_fourier(const SampledSymbol& f, const SymplecticForm& form, bool conjugated) {
    const PhaseGrid& g = f.grid();
    if (form.dim() != g.dim()) throw Error(ErrorKind::DimensionMismatch, "form and grid dimensions differ");
    const int d = g.dim();
    const Mat inv = form.inverse();
    // wave vector for direct evaluation: e^{sign i x.w}, w = 2 M^{-1} xi
    const int sign = conjugated ? -1 : +1;
    // fhat argument: k = -sign * 2 M^{-1} xi
    const Mat to_k = (-2.0 * sign) * inv;

    const PhaseGrid rg = g.reciprocal();
    Mat lattice_map(d, d);
    bool lattice = true;
    for (int b = 0; b < d && lattice; ++b)
        for (int a = 0; a < d; ++a) {
            const double r = to_k(b, a) * g.spacing(a) / rg.spacing(b);
            if (std::abs(r - std::round(r)) > 1e-9) {
                lattice = false;
                break;
            }
            lattice_map(b, a) = std::round(r);
        }

    std::vector<cd> out(g.size());
    const double w = g.cell_volume();
    std::size_t direct_nodes = 0;
    std::vector<char> needs_direct(g.size(), lattice ? 0 : 1);
    if (lattice) {
        const SampledSymbol fhat = fourier(f);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto idx = g.multi_index(i);
            std::vector<int> target(d);
            bool inside = true;
            for (int b = 0; b < d; ++b) {
                double t = rg.points(b) / 2;
                for (int a = 0; a < d; ++a) t += lattice_map(b, a) * (idx[a] - g.points(a) / 2);
                target[b] = static_cast<int>(t);
                if (target[b] < 0 || target[b] >= rg.points(b)) inside = false;
            }
            if (inside)
                out[i] = fhat[rg.flat_index(target)];
            else
                needs_direct[i] = 1;
        }
    }
    for (char c : needs_direct) direct_nodes += static_cast<std::size_t>(c);
    parallel_for(g.size(), [&](std::size_t i) {
        if (!needs_direct[i]) return;
        const Vec wv = 2.0 * inv * g.node(i);
        out[i] = w * fourier_sum_at(f.values(), g, wv, sign);
    });

    SampledSymbol result(g, std::move(out));
    result.with_method(lattice ? (direct_nodes ? "fft_lattice+direct_quadrature" : "fft_lattice") : "direct_quadrature");
    const double peak = f.sup_norm();
    if (peak > 0.0 && f.boundary_max() / peak > resampling_residual_tol)
        result.add_warning(std::string(warning::resampling_accuracy_loss));
    return result;
}

}  // namespace moyalkit
