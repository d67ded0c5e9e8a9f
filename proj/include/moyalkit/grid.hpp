#pragma once

// Uniform phase-space grids and complex samples of symbols on them.
//
// A grid covers the box prod_i [-L_i, L_i) with N_i nodes per axis at
// x_k = -L_i + k h_i, h_i = 2 L_i / N_i. N_i is even, so the origin is always
// the node k = N_i / 2. Values are stored row-major (last axis fastest).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "symplectic.hpp"

namespace moyalkit {

using cd = std::complex<double>;

inline constexpr double default_boundary_tol = 1e-8;
inline constexpr int max_grid_dim = 6;

class PhaseGrid {
public:
    PhaseGrid() = default;

    PhaseGrid(std::vector<double> half_extent, std::vector<int> points)
        : half_extent_(std::move(half_extent)), points_(std::move(points)) {
        if (half_extent_.size() != points_.size() || half_extent_.empty())
            throw Error(ErrorKind::DimensionMismatch, "grid needs one extent and one point count per axis");
        if (dim() > max_grid_dim)
            throw Error(ErrorKind::InvalidArgument, "grids beyond dimension 6 are not supported");
        for (std::size_t i = 0; i < points_.size(); ++i) {
            if (points_[i] < 8 || points_[i] % 2 != 0)
                throw Error(ErrorKind::InvalidArgument, "points per axis must be even and at least 8");
            if (!(half_extent_[i] > 0.0) || !std::isfinite(half_extent_[i]))
                throw Error(ErrorKind::InvalidArgument, "half extent must be positive and finite");
        }
        strides_.assign(points_.size(), 1);
        for (int i = dim() - 2; i >= 0; --i) strides_[i] = strides_[i + 1] * static_cast<std::size_t>(points_[i + 1]);
    }

    static PhaseGrid uniform(int dim, int points, double half_extent) {
        return PhaseGrid(std::vector<double>(dim, half_extent), std::vector<int>(dim, points));
    }

    int dim() const { return static_cast<int>(points_.size()); }
    const std::vector<double>& half_extent() const { return half_extent_; }
    const std::vector<int>& points() const { return points_; }
    double half_extent(int axis) const { return half_extent_[axis]; }
    int points(int axis) const { return points_[axis]; }
    double spacing(int axis) const { return 2.0 * half_extent_[axis] / points_[axis]; }
    std::size_t stride(int axis) const { return strides_[axis]; }

    std::size_t size() const {
        std::size_t m = 1;
        for (int n : points_) m *= static_cast<std::size_t>(n);
        return m;
    }

    // Product of spacings: the quadrature weight of one node.
    double cell_volume() const {
        double v = 1.0;
        for (int i = 0; i < dim(); ++i) v *= spacing(i);
        return v;
    }

    double coordinate(int axis, int k) const { return -half_extent_[axis] + k * spacing(axis); }

    std::vector<int> multi_index(std::size_t flat) const {
        std::vector<int> idx(points_.size());
        for (int i = 0; i < dim(); ++i) {
            idx[i] = static_cast<int>(flat / strides_[i]);
            flat %= strides_[i];
        }
        return idx;
    }

    std::size_t flat_index(std::span<const int> idx) const {
        std::size_t f = 0;
        for (int i = 0; i < dim(); ++i) f += static_cast<std::size_t>(idx[i]) * strides_[i];
        return f;
    }

    Vec node(std::size_t flat) const {
        Vec x(dim());
        for (int i = 0; i < dim(); ++i) {
            const int k = static_cast<int>(flat / strides_[i]);
            flat %= strides_[i];
            x[i] = coordinate(i, k);
        }
        return x;
    }

    std::size_t origin_index() const {
        std::size_t f = 0;
        for (int i = 0; i < dim(); ++i) f += static_cast<std::size_t>(points_[i] / 2) * strides_[i];
        return f;
    }

    bool on_boundary(std::size_t flat) const {
        for (int i = 0; i < dim(); ++i) {
            const int k = static_cast<int>(flat / strides_[i]);
            flat %= strides_[i];
            if (k == 0 || k == points_[i] - 1) return true;
        }
        return false;
    }

    // Grid on which the Fourier transform is sampled: same point counts,
    // half extent pi N / (2 L), hence spacing pi / L.
    PhaseGrid reciprocal() const {
        std::vector<double> ext(points_.size());
        for (int i = 0; i < dim(); ++i) ext[i] = std::numbers::pi * points_[i] / (2.0 * half_extent_[i]);
        return PhaseGrid(std::move(ext), points_);
    }

    // Equal point counts and extents equal up to roundoff of reciprocal().
    bool same_as(const PhaseGrid& other) const {
        if (points_ != other.points_) return false;
        for (int i = 0; i < dim(); ++i)
            if (std::abs(half_extent_[i] - other.half_extent_[i]) > 1e-12 * half_extent_[i]) return false;
        return true;
    }

    // Continuous index of a coordinate along an axis.
    double fractional_index(int axis, double x) const { return (x + half_extent_[axis]) / spacing(axis); }

    bool contains(std::span<const double> x) const {
        for (int i = 0; i < dim(); ++i)
            if (x[i] < -half_extent_[i] || x[i] >= half_extent_[i]) return false;
        return true;
    }

private:
    std::vector<double> half_extent_;
    std::vector<int> points_;
    std::vector<std::size_t> strides_;
};

inline void require_same_grid(const PhaseGrid& a, const PhaseGrid& b, const char* what) {
    if (!a.same_as(b)) throw Error(ErrorKind::GridMismatch, what);
}

class SampledSymbol {
public:
    SampledSymbol() = default;

    SampledSymbol(PhaseGrid grid, std::vector<cd> values, double boundary_tol = default_boundary_tol)
        : grid_(std::move(grid)), values_(std::move(values)) {
        if (values_.size() != grid_.size())
            throw Error(ErrorKind::DimensionMismatch, "sample count does not match grid size");
        decay_checked_ = passes_decay_check(boundary_tol);
    }

    static SampledSymbol zeros(const PhaseGrid& grid) { return {grid, std::vector<cd>(grid.size())}; }

    const PhaseGrid& grid() const { return grid_; }
    const std::vector<cd>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    int dim() const { return grid_.dim(); }
    const cd& operator[](std::size_t i) const { return values_[i]; }

    bool decay_checked() const { return decay_checked_; }
    const std::string& method() const { return method_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    SampledSymbol& with_method(std::string m) {
        method_ = std::move(m);
        return *this;
    }
    SampledSymbol& add_warning(std::string w) {
        if (std::find(warnings_.begin(), warnings_.end(), w) == warnings_.end()) warnings_.push_back(std::move(w));
        return *this;
    }

    cd at_origin() const { return values_[grid_.origin_index()]; }

    double sup_norm() const {
        double m = 0.0;
        for (const cd& v : values_) m = std::max(m, std::abs(v));
        return m;
    }

    double boundary_max() const {
        double m = 0.0;
        for (std::size_t i = 0; i < values_.size(); ++i)
            if (grid_.on_boundary(i)) m = std::max(m, std::abs(values_[i]));
        return m;
    }

    // max |f| on the boundary shell <= tol * max |f|; the zero symbol passes.
    bool passes_decay_check(double tol) const {
        const double peak = sup_norm();
        if (peak == 0.0) return true;
        return boundary_max() <= tol * peak;
    }

    SampledSymbol conj() const {
        std::vector<cd> v(values_.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::conj(values_[i]);
        return {grid_, std::move(v)};
    }

    // g(t) -> g(-t). Node -L has no mirror node on the half-open box; it maps to zero.
    SampledSymbol reflected() const {
        std::vector<cd> v(values_.size(), cd{});
        std::vector<int> src(grid_.dim());
        for (std::size_t i = 0; i < v.size(); ++i) {
            auto idx = grid_.multi_index(i);
            bool inside = true;
            for (int a = 0; a < grid_.dim(); ++a) {
                src[a] = grid_.points(a) - idx[a];
                if (src[a] >= grid_.points(a)) inside = false;
            }
            if (inside) v[i] = values_[grid_.flat_index(src)];
        }
        return {grid_, std::move(v)};
    }

    SampledSymbol scaled(cd factor) const {
        std::vector<cd> v(values_);
        for (cd& x : v) x *= factor;
        return {grid_, std::move(v)};
    }

    friend SampledSymbol operator+(const SampledSymbol& a, const SampledSymbol& b) {
        require_same_grid(a.grid_, b.grid_, "sum of symbols on different grids");
        std::vector<cd> v(a.values_.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.values_[i] + b.values_[i];
        return {a.grid_, std::move(v)};
    }

    friend SampledSymbol operator-(const SampledSymbol& a, const SampledSymbol& b) { return a + b.scaled(-1.0); }

    friend SampledSymbol operator*(const SampledSymbol& a, const SampledSymbol& b) {
        require_same_grid(a.grid_, b.grid_, "product of symbols on different grids");
        std::vector<cd> v(a.values_.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.values_[i] * b.values_[i];
        return {a.grid_, std::move(v)};
    }

private:
    PhaseGrid grid_;
    std::vector<cd> values_;
    bool decay_checked_ = false;
    std::string method_;
    std::vector<std::string> warnings_;
};

// Pointwise evaluation of expr(x) at every node. Non-finite results or
// exceptions become EvaluationFailure carrying the node index.
template <class Evaluator>
SampledSymbol sample(Evaluator&& expr, const PhaseGrid& grid, double boundary_tol = default_boundary_tol) {
    std::vector<cd> values(grid.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const Vec x = grid.node(i);
        cd v;
        try {
            v = cd(expr(std::span<const double>(x.data(), static_cast<std::size_t>(x.size()))));
        } catch (const std::exception& e) {
            throw Error(ErrorKind::EvaluationFailure, "node " + std::to_string(i) + ": " + e.what());
        }
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw Error(ErrorKind::EvaluationFailure, "non-finite value at node " + std::to_string(i));
        values[i] = v;
    }
    SampledSymbol out(grid, std::move(values), boundary_tol);
    if (!out.decay_checked()) out.add_warning(std::string(warning::decay_check_failed));
    return out;
}

namespace detail {
// Pairwise summation: fixed order, O(log n) error growth.
inline cd pairwise_sum(const cd* v, std::size_t n) {
    if (n <= 16) {
        cd s{};
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}
}  // namespace detail

// Periodic trapezoid rule: prod h_i * sum of samples.
inline cd quadrature(const SampledSymbol& f) {
    return f.grid().cell_volume() * detail::pairwise_sum(f.values().data(), f.size());
}

// sup |a - b| / sup |b|, or sup |a - b| when b vanishes.
inline double sup_relative_error(const SampledSymbol& a, const SampledSymbol& b) {
    require_same_grid(a.grid(), b.grid(), "error between symbols on different grids");
    double diff = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
    const double peak = b.sup_norm();
    return peak > 0.0 ? diff / peak : diff;
}

}  // namespace moyalkit
