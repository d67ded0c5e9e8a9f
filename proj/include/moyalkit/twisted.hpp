#pragma once

// Weyl-Heisenberg action and twisted convolution.
//
//   (g1 # g2)(s) = int g1(t) g2(s - t) e^{(i/2) theta(s,t)} dt
//   tau_s g(t)   = e^{ (i/2) theta(s,t)} g(t - s)
//   taubar_s g(t)= e^{-(i/2) theta(s,t)} g(t - s)
//   (v # g)(s)   = < v, e^{ (i/2) theta(s,.)} g(s - .) >
//   (g # v)(s)   = < v, e^{-(i/2) theta(s,.)} g(s - .) >
//
// Functionals are desk-scale models of dual-space elements: a Dirac delta,
// a finite combination of point masses, or a regular (sampled) function with
// a declared polynomial growth exponent.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

#include "error.hpp"
#include "fourier.hpp"
#include "grid.hpp"
#include "parallel.hpp"
#include "symplectic.hpp"

namespace moyalkit {

enum class Side { left, right };

// ---------------------------------------------------------------------------
// Weyl-Heisenberg group

struct GroupElement {
    double alpha = 0.0;
    Vec s;
};

inline GroupElement heisenberg_multiply(const GroupElement& a1, const GroupElement& a2, const SkewForm& form) {
    if (a1.s.size() != a2.s.size() || a1.s.size() != form.dim())
        throw Error(ErrorKind::DimensionMismatch, "group elements and form must share a dimension");
    return {a1.alpha + a2.alpha + 0.5 * form(a1.s, a2.s), a1.s + a2.s};
}

// ---------------------------------------------------------------------------
// Twisted shifts

enum class BoundaryMode { zero, periodic };

namespace detail {

inline cd unit_phase(double arg) { return {std::cos(arg), std::sin(arg)}; }

inline std::span<const double> as_span(const Vec& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace detail

// conjugated = false: tau_s; true: taubar_s. Off-lattice shifts interpolate.
inline SampledSymbol twisted_shift(const SampledSymbol& g, const Vec& s, const SkewForm& form, bool conjugated,
                                   BoundaryMode mode = BoundaryMode::zero) {
    const PhaseGrid& grid = g.grid();
    if (s.size() != grid.dim() || form.dim() != grid.dim())
        throw Error(ErrorKind::DimensionMismatch, "shift, form and grid dimensions differ");
    const auto moved = shift_samples(g, -s, mode == BoundaryMode::periodic);
    const double sign = conjugated ? -1.0 : 1.0;
    std::vector<cd> out(grid.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const Vec t = grid.node(i);
        const double theta = form(s, t);
        // theta == 0 leaves samples bit-identical
        out[i] = theta == 0.0 ? moved.values[i] : moved.values[i] * detail::unit_phase(0.5 * sign * theta);
    }
    SampledSymbol result(grid, std::move(out));
    if (moved.dropped_ratio > default_boundary_tol) result.add_warning(std::string(warning::shift_out_of_box));
    return result;
}

// ---------------------------------------------------------------------------
// Twisted convolution of sampled functions (direct quadrature)

namespace detail {

// sum over t of a(t) b(s - t) e^{(i/2) theta(s,t)} at output node s. Lattice
// differences stay on the lattice; b read outside the box is zero.
class TwistedKernel {
public:
    TwistedKernel(const SampledSymbol& a, const SampledSymbol& b, const SkewForm& form)
        : grid_(a.grid()), a_(a.values().data()), b_(b.values().data()), m_(form.matrix()) {
        require_same_grid(a.grid(), b.grid(), "twisted convolution of symbols on different grids");
        if (form.dim() != grid_.dim()) throw Error(ErrorKind::DimensionMismatch, "form and grid dimensions differ");
    }

    cd at(std::size_t out_flat) const {
        const int d = grid_.dim();
        const auto idx = grid_.multi_index(out_flat);
        const Vec s = grid_.node(out_flat);
        const Vec u = 0.5 * (m_.transpose() * s);  // theta(s,t)/2 = u . t
        std::vector<int> lo(d), hi(d);
        std::vector<std::vector<cd>> phase(d);
        for (int ax = 0; ax < d; ++ax) {
            const int n = grid_.points(ax);
            lo[ax] = std::max(0, idx[ax] + n / 2 - n + 1);
            hi[ax] = std::min(n - 1, idx[ax] + n / 2);
            phase[ax].resize(n);
            for (int t = lo[ax]; t <= hi[ax]; ++t) phase[ax][t] = unit_phase(u[ax] * grid_.coordinate(ax, t));
        }
        const cd sum = recurse(0, idx, lo, hi, phase, 0, 0);
        return grid_.cell_volume() * sum;
    }

private:
    cd recurse(int ax, const std::vector<int>& idx, const std::vector<int>& lo, const std::vector<int>& hi,
               const std::vector<std::vector<cd>>& phase, std::size_t off_a, std::size_t off_b) const {
        const int n = grid_.points(ax);
        const std::size_t stride = grid_.stride(ax);
        cd acc{};
        if (ax == grid_.dim() - 1) {
            for (int t = lo[ax]; t <= hi[ax]; ++t) {
                const int j = idx[ax] + n / 2 - t;
                acc += a_[off_a + static_cast<std::size_t>(t)] * b_[off_b + static_cast<std::size_t>(j)] * phase[ax][t];
            }
            return acc;
        }
        for (int t = lo[ax]; t <= hi[ax]; ++t) {
            const int j = idx[ax] + n / 2 - t;
            acc += phase[ax][t] * recurse(ax + 1, idx, lo, hi, phase, off_a + static_cast<std::size_t>(t) * stride,
                                          off_b + static_cast<std::size_t>(j) * stride);
        }
        return acc;
    }

    const PhaseGrid& grid_;
    const cd* a_;
    const cd* b_;
    Mat m_;
};

}  // namespace detail

// Direct O(M^2) quadrature at every node; form may be the zero form
// (ordinary convolution).
inline SampledSymbol twisted_convolution(const SampledSymbol& g1, const SampledSymbol& g2, const SkewForm& form) {
    detail::TwistedKernel kernel(g1, g2, form);
    std::vector<cd> out(g1.size());
    parallel_for(out.size(), [&](std::size_t i) { out[i] = kernel.at(i); });
    SampledSymbol r(g1.grid(), std::move(out));
    r.with_method("direct_quadrature");
    return r;
}

// Same quadrature restricted to the listed output nodes.
inline std::vector<cd> twisted_convolution_at(const SampledSymbol& g1, const SampledSymbol& g2, const SkewForm& form,
                                              const std::vector<std::size_t>& nodes) {
    detail::TwistedKernel kernel(g1, g2, form);
    std::vector<cd> out(nodes.size());
    parallel_for(nodes.size(), [&](std::size_t k) { out[k] = kernel.at(nodes[k]); });
    return out;
}

inline SampledSymbol ordinary_convolution(const SampledSymbol& g1, const SampledSymbol& g2) {
    return twisted_convolution(g1, g2, SkewForm::zero(g1.dim()));
}

// ---------------------------------------------------------------------------
// Functionals

struct Delta {
    Vec location;
};

struct PointMass {
    Vec location;
    cd weight;
};

struct PointMasses {
    std::vector<PointMass> masses;
};

struct Regular {
    SampledSymbol symbol;
    double growth_exponent = 0.0;  // |v(x)| (1+|x|)^{-N0} bounded
    std::string source_path;       // .pss file the samples came from, if any
};

class Functional {
public:
    using Variant = std::variant<Delta, PointMasses, Regular>;

    static Functional delta(Vec location) { return Functional(Delta{std::move(location)}); }

    static Functional point_masses(std::vector<PointMass> masses) {
        if (masses.empty()) throw Error(ErrorKind::InvalidArgument, "point-mass functional needs at least one mass");
        const auto d = masses.front().location.size();
        for (const auto& m : masses) {
            if (m.location.size() != d) throw Error(ErrorKind::DimensionMismatch, "point masses of mixed dimension");
            if (!std::isfinite(m.weight.real()) || !std::isfinite(m.weight.imag()))
                throw Error(ErrorKind::InvalidArgument, "point-mass weight is not finite");
        }
        return Functional(PointMasses{std::move(masses)});
    }

    // Checks the declared growth: the weighted envelope |v(x)| (1+|x|)^{-N0}
    // may not exceed 10 times its maximum over the central half-box.
    static Functional regular(SampledSymbol symbol, double growth_exponent, std::string source_path = {}) {
        if (!(growth_exponent >= 0.0)) throw Error(ErrorKind::InvalidArgument, "growth exponent must be nonnegative");
        const PhaseGrid& g = symbol.grid();
        double all = 0.0, central = 0.0;
        for (std::size_t i = 0; i < symbol.size(); ++i) {
            const Vec x = g.node(i);
            const double w = std::abs(symbol[i]) * std::pow(1.0 + x.norm(), -growth_exponent);
            all = std::max(all, w);
            bool inner = true;
            for (int a = 0; a < g.dim(); ++a)
                if (std::abs(x[a]) > 0.5 * g.half_extent(a)) inner = false;
            if (inner) central = std::max(central, w);
        }
        if (all > 10.0 * central)
            throw Error(ErrorKind::GrowthTooFast, "samples grow faster than the declared growth exponent");
        return Functional(Regular{std::move(symbol), growth_exponent, std::move(source_path)});
    }

    const Variant& value() const { return v_; }

    bool is_delta() const { return std::holds_alternative<Delta>(v_); }
    bool is_regular() const { return std::holds_alternative<Regular>(v_); }

    int dim() const {
        return std::visit(
            [](const auto& x) -> int {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, Delta>) return static_cast<int>(x.location.size());
                else if constexpr (std::is_same_v<T, PointMasses>) return static_cast<int>(x.masses.front().location.size());
                else return x.symbol.dim();
            },
            v_);
    }

    // <v*, g> = conj <v, g*>
    Functional conj() const {
        return std::visit(
            [](const auto& x) -> Functional {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, Delta>) return Functional(x);
                else if constexpr (std::is_same_v<T, PointMasses>) {
                    PointMasses p = x;
                    for (auto& m : p.masses) m.weight = std::conj(m.weight);
                    return Functional(std::move(p));
                } else return Functional(Regular{x.symbol.conj(), x.growth_exponent, x.source_path});
            },
            v_);
    }

    // <v_check, g> = <v, g_check>
    Functional reflected() const {
        return std::visit(
            [](const auto& x) -> Functional {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, Delta>) return Functional(Delta{-x.location});
                else if constexpr (std::is_same_v<T, PointMasses>) {
                    PointMasses p = x;
                    for (auto& m : p.masses) m.location = -m.location;
                    return Functional(std::move(p));
                } else return Functional(Regular{x.symbol.reflected(), x.growth_exponent, {}});
            },
            v_);
    }

    // The functional phi -> <v, h phi>. Point masses pick up h at their
    // locations; regular samples are multiplied node by node.
    Functional weighted(const SampledSymbol& h) const {
        return std::visit(
            [&](const auto& x) -> Functional {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, Delta>) {
                    return Functional(PointMasses{{PointMass{x.location, point_value(h, x.location)}}});
                } else if constexpr (std::is_same_v<T, PointMasses>) {
                    PointMasses p = x;
                    for (auto& m : p.masses) m.weight *= point_value(h, m.location);
                    return Functional(std::move(p));
                } else {
                    require_same_grid(x.symbol.grid(), h.grid(), "regular functional weighted on a different grid");
                    return Functional(Regular{x.symbol * h, x.growth_exponent, {}});
                }
            },
            v_);
    }

    // <v, phi> for a sampled test function. Off-lattice point evaluations use
    // the band-limited interpolant of phi.
    cd pair(const SampledSymbol& phi) const {
        if (dim() != phi.dim()) throw Error(ErrorKind::DimensionMismatch, "functional and test function dimensions differ");
        return std::visit(
            [&](const auto& x) -> cd {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, Delta>) return point_value(phi, x.location);
                else if constexpr (std::is_same_v<T, PointMasses>) {
                    cd acc{};
                    for (const auto& m : x.masses) acc += m.weight * point_value(phi, m.location);
                    return acc;
                } else {
                    require_same_grid(x.symbol.grid(), phi.grid(), "regular functional paired on a different grid");
                    return quadrature(x.symbol * phi);
                }
            },
            v_);
    }

    static cd point_value(const SampledSymbol& phi, const Vec& a) {
        const PhaseGrid& g = phi.grid();
        std::vector<int> idx(g.dim());
        bool lattice = true;
        for (int ax = 0; ax < g.dim(); ++ax) {
            const double fi = g.fractional_index(ax, a[ax]);
            const double r = std::round(fi);
            if (std::abs(fi - r) > 1e-12 * std::max(1.0, std::abs(fi))) lattice = false;
            idx[ax] = static_cast<int>(r);
        }
        if (lattice) {
            for (int ax = 0; ax < g.dim(); ++ax)
                if (idx[ax] < 0 || idx[ax] >= g.points(ax)) return {};
            return phi[g.flat_index(idx)];
        }
        return BandLimited(phi)(a);
    }

private:
    explicit Functional(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

// ---------------------------------------------------------------------------
// Function-functional products

namespace detail {

inline void check_growth(const Regular& r, const SampledSymbol& g) {
    const PhaseGrid& grid = g.grid();
    double diameter = 0.0;
    for (int a = 0; a < grid.dim(); ++a) diameter += std::pow(2.0 * grid.half_extent(a), 2);
    diameter = std::sqrt(diameter);
    const double peak = g.sup_norm();
    if (peak == 0.0) return;
    const double edge = g.boundary_max() / peak;
    if (edge * std::pow(1.0 + diameter, r.growth_exponent) > default_boundary_tol)
        throw Error(ErrorKind::GrowthTooFast,
                    "test function does not decay fast enough to absorb the functional's growth in the box");
}

// (v # g)(s) for regular v, straight from the pairing: for each s build
// phi_s(t) = e^{+-(i/2) theta(s,t)} g(s - t) and integrate against v.
inline SampledSymbol regular_product(const Regular& r, const SampledSymbol& g, const SkewForm& form, Side side) {
    const PhaseGrid& grid = g.grid();
    require_same_grid(r.symbol.grid(), grid, "regular functional on a different grid");
    check_growth(r, g);
    const double sign = side == Side::left ? 1.0 : -1.0;
    const int d = grid.dim();
    const Mat m = form.matrix();
    std::vector<cd> out(grid.size());
    parallel_for(grid.size(), [&](std::size_t si) {
        const auto sidx = grid.multi_index(si);
        const Vec s = grid.node(si);
        const Vec ms = m.transpose() * s;
        std::vector<int> diff(d);
        cd acc{};
        for (std::size_t ti = 0; ti < grid.size(); ++ti) {
            const cd vt = r.symbol[ti];
            if (vt == cd{}) continue;
            std::size_t flat = ti;
            bool inside = true;
            double theta = 0.0;
            for (int a = 0; a < d; ++a) {
                const int t = static_cast<int>(flat / grid.stride(a));
                flat %= grid.stride(a);
                diff[a] = sidx[a] - t + grid.points(a) / 2;
                if (diff[a] < 0 || diff[a] >= grid.points(a)) inside = false;
                theta += ms[a] * grid.coordinate(a, t);
            }
            if (!inside) continue;
            acc += vt * unit_phase(0.5 * sign * theta) * g[grid.flat_index(diff)];
        }
        out[si] = grid.cell_volume() * acc;
    });
    SampledSymbol res(grid, std::move(out));
    res.with_method("pairing_quadrature");
    return res;
}

}  // namespace detail

// Left: (v # g)(s) = <v, e^{(i/2) theta(s,.)} g(s-.)>; right: opposite phase.
// A delta at a gives e^{+-(i/2) theta(s,a)} g(s - a), i.e. the conjugate
// twisted shift taubar_a g on the left and tau_a g on the right.
inline SampledSymbol convolve_functional(const Functional& v, const SampledSymbol& g, const SkewForm& form, Side side) {
    if (v.dim() != g.dim() || form.dim() != g.dim())
        throw Error(ErrorKind::DimensionMismatch, "functional, symbol and form dimensions differ");
    const bool conj_shift = side == Side::left;
    return std::visit(
        [&](const auto& x) -> SampledSymbol {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Delta>) {
                return twisted_shift(g, x.location, form, conj_shift);
            } else if constexpr (std::is_same_v<T, PointMasses>) {
                SampledSymbol acc = SampledSymbol::zeros(g.grid());
                for (const auto& m : x.masses) acc = acc + twisted_shift(g, m.location, form, conj_shift).scaled(m.weight);
                return acc;
            } else {
                return detail::regular_product(x, g, form, side);
            }
        },
        v.value());
}

// Duality form: left <v, gcheck # f>, right <v, f # gcheck>.
inline cd duality_convolution(const Functional& v, const SampledSymbol& g, const SampledSymbol& f, const SkewForm& form,
                              Side side) {
    const SampledSymbol gc = g.reflected();
    if (const auto* r = std::get_if<Regular>(&v.value())) detail::check_growth(*r, g);
    const SampledSymbol prod = side == Side::left ? twisted_convolution(gc, f, form) : twisted_convolution(f, gc, form);
    return v.pair(prod);
}

struct ComposedValues {
    cd left;   // (v1 # (v2 # probe))(0)
    cd right;  // ((probe # v1) # v2)(0)
};

inline ComposedValues multiplier_compose(const Functional& v1, const Functional& v2, const SampledSymbol& probe,
                                         const SkewForm& form) {
    const SampledSymbol inner_left = convolve_functional(v2, probe, form, Side::left);
    const SampledSymbol outer_left = convolve_functional(v1, inner_left, form, Side::left);
    const SampledSymbol inner_right = convolve_functional(v1, probe, form, Side::right);
    const SampledSymbol outer_right = convolve_functional(v2, inner_right, form, Side::right);
    return {outer_left.at_origin(), outer_right.at_origin()};
}

// ---------------------------------------------------------------------------
// Strong continuity of the shift representation

struct ContinuityRow {
    double shift_norm = 0.0;
    double sup_difference = 0.0;
};

inline std::vector<ContinuityRow> shift_continuity_probe(const SampledSymbol& f, const SkewForm& form,
                                                         const std::vector<Vec>& shifts,
                                                         BoundaryMode mode = BoundaryMode::zero) {
    std::vector<ContinuityRow> table;
    table.reserve(shifts.size());
    for (const Vec& s : shifts) {
        const SampledSymbol moved = twisted_shift(f, s, form, false, mode);
        double diff = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) diff = std::max(diff, std::abs(moved[i] - f[i]));
        table.push_back({s.norm(), diff});
    }
    return table;
}

// Last entry below the first, and every step nonincreasing up to 10% jitter.
inline bool continuity_trend_holds(const std::vector<ContinuityRow>& table) {
    if (table.size() < 2) return true;
    if (!(table.back().sup_difference <= table.front().sup_difference)) return false;
    if (table.front().sup_difference > 0.0 && !(table.back().sup_difference < table.front().sup_difference))
        return false;
    for (std::size_t i = 1; i < table.size(); ++i)
        if (table[i].sup_difference > 1.1 * table[i - 1].sup_difference) return false;
    return true;
}

}  // namespace moyalkit
