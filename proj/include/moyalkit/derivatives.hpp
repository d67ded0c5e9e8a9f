#pragma once

// Mixed partial derivatives of sampled symbols.
//
// Box-decayed symbols are differentiated spectrally (Fourier multiplier
// (i s)^kappa). Symbols that do not decay in the box (coordinate functions,
// constants, polynomial multipliers) would alias under a periodic transform,
// so they use one-sided/centered finite-difference stencils with kappa_a + 8
// points, exact for polynomials of degree kappa_a + 7.

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <string>
#include <vector>

#include "error.hpp"
#include "fourier.hpp"
#include "grid.hpp"

namespace moyalkit {

inline constexpr double spectral_blowup_factor = 1e12;
// Fourier coefficients below this fraction of the peak are roundoff. The
// floor is raised to the symbol's boundary ratio when that is larger: the
// jump of the periodic extension at the box edge leaves a spectral plateau of
// that relative height which carries no information about f. Coefficients
// under the floor are dropped before multiplying by (i s)^kappa so that high
// orders do not amplify them.
inline constexpr double spectral_noise_floor = 1e-15;

enum class DerivativeMethod { spectral, finite_difference };

inline std::string to_string(DerivativeMethod m) {
    return m == DerivativeMethod::spectral ? "spectral" : "finite_difference";
}

using MultiIndex = std::vector<int>;

inline int order(const MultiIndex& k) {
    int s = 0;
    for (int v : k) s += v;
    return s;
}

namespace detail {

// Fornberg's recursion: weights[j][m] approximate the m-th derivative at z
// from samples at nodes[j].
inline std::vector<std::vector<double>> fornberg_weights(double z, const std::vector<double>& nodes, int max_order) {
    const int n = static_cast<int>(nodes.size()) - 1;
    std::vector<std::vector<double>> c(nodes.size(), std::vector<double>(max_order + 1, 0.0));
    double c1 = 1.0, c4 = nodes[0] - z;
    c[0][0] = 1.0;
    for (int i = 1; i <= n; ++i) {
        const int mn = std::min(i, max_order);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = nodes[i] - z;
        for (int j = 0; j < i; ++j) {
            const double c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    return c;
}

// m-th derivative along one axis by finite differences.
inline std::vector<cd> fd_axis(const std::vector<cd>& v, const PhaseGrid& g, int axis, int m) {
    if (m == 0) return v;
    const int n = g.points(axis);
    const int width = std::min(n, m + 8);
    const double h = g.spacing(axis);
    std::vector<int> start(n);
    std::vector<std::vector<double>> w(n);
    for (int k = 0; k < n; ++k) {
        start[k] = std::clamp(k - width / 2, 0, n - width);
        std::vector<double> nodes(width);
        for (int j = 0; j < width; ++j) nodes[j] = static_cast<double>(start[k] + j);
        auto c = fornberg_weights(static_cast<double>(k), nodes, m);
        w[k].resize(width);
        for (int j = 0; j < width; ++j) w[k][j] = c[j][m] / std::pow(h, m);
    }
    std::vector<cd> out(v.size());
    const std::size_t stride = g.stride(axis);
    const std::size_t block = stride * static_cast<std::size_t>(n);
    for (std::size_t base = 0; base < v.size(); base += block)
        for (std::size_t inner = 0; inner < stride; ++inner) {
            const cd* line = v.data() + base + inner;
            cd* dst = out.data() + base + inner;
            for (int k = 0; k < n; ++k) {
                cd acc{};
                for (int j = 0; j < width; ++j) acc += w[k][j] * line[static_cast<std::size_t>(start[k] + j) * stride];
                dst[static_cast<std::size_t>(k) * stride] = acc;
            }
        }
    return out;
}

}  // namespace detail

// Cached mixed partials of one symbol.
class DerivativeCache {
public:
    DerivativeCache(SampledSymbol f, DerivativeMethod method) : f_(std::move(f)), method_(method) {
        scale_ = f_.sup_norm();
        if (method_ == DerivativeMethod::spectral) {
            spectrum_ = fourier(f_);
            const double edge = scale_ > 0.0 ? f_.boundary_max() / scale_ : 0.0;
            const double floor = std::max(spectral_noise_floor, edge) * spectrum_.sup_norm();
            std::vector<cd> v = spectrum_.values();
            for (cd& x : v)
                if (std::abs(x) < floor) x = 0.0;
            spectrum_ = SampledSymbol(spectrum_.grid(), std::move(v));
        }
    }

    static DerivativeMethod default_method(const SampledSymbol& f) {
        return f.decay_checked() ? DerivativeMethod::spectral : DerivativeMethod::finite_difference;
    }

    static DerivativeCache for_symbol(const SampledSymbol& f) { return DerivativeCache(f, default_method(f)); }

    DerivativeMethod method() const { return method_; }
    const SampledSymbol& symbol() const { return f_; }

    const SampledSymbol& get(const MultiIndex& kappa) {
        if (static_cast<int>(kappa.size()) != f_.dim())
            throw Error(ErrorKind::DimensionMismatch, "multi-index length does not match grid dimension");
        if (auto it = cache_.find(kappa); it != cache_.end()) return it->second;
        SampledSymbol d = order(kappa) == 0 ? f_ : compute(kappa);
        if (scale_ > 0.0 && d.sup_norm() > spectral_blowup_factor * scale_)
            throw Error(ErrorKind::SpectralBlowup, "derivative of order " + std::to_string(order(kappa)) +
                                                       " exceeds 1e12 times the input scale");
        return cache_.emplace(kappa, std::move(d)).first->second;
    }

private:
    SampledSymbol compute(const MultiIndex& kappa) const {
        const PhaseGrid& g = f_.grid();
        if (method_ == DerivativeMethod::finite_difference) {
            std::vector<cd> v = f_.values();
            for (int a = 0; a < g.dim(); ++a) v = detail::fd_axis(v, g, a, kappa[a]);
            return {g, std::move(v)};
        }
        const PhaseGrid& rg = spectrum_.grid();
        std::vector<std::vector<cd>> factor(g.dim());
        for (int a = 0; a < g.dim(); ++a) {
            factor[a].resize(rg.points(a));
            for (int m = 0; m < rg.points(a); ++m) {
                // the unpaired Nyquist mode carries no derivative information for odd orders
                if (m == 0 && kappa[a] % 2 == 1) {
                    factor[a][m] = 0.0;
                    continue;
                }
                cd p{1.0, 0.0};
                for (int e = 0; e < kappa[a]; ++e) p *= cd(0.0, rg.coordinate(a, m));
                factor[a][m] = p;
            }
        }
        std::vector<cd> v(spectrum_.values());
        for (std::size_t i = 0; i < v.size(); ++i) {
            std::size_t flat = i;
            cd mult{1.0, 0.0};
            for (int a = 0; a < g.dim(); ++a) {
                mult *= factor[a][flat / rg.stride(a)];
                flat %= rg.stride(a);
            }
            v[i] *= mult;
        }
        SampledSymbol out = inverse_fourier(SampledSymbol(rg, std::move(v)));
        return {g, out.values()};
    }

    SampledSymbol f_;
    DerivativeMethod method_;
    SampledSymbol spectrum_;
    double scale_ = 0.0;
    std::map<MultiIndex, SampledSymbol> cache_;
};

inline SampledSymbol derivative(const SampledSymbol& f, const MultiIndex& kappa) {
    auto cache = DerivativeCache::for_symbol(f);
    return cache.get(kappa);
}

}  // namespace moyalkit
