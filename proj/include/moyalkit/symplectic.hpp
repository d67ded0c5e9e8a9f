#pragma once

// Symplectic linear algebra: skew forms theta(s,t) = s . M t, the standard
// matrix J = [[0, I], [-I, 0]], canonical bases and the dual deformation
// -4 M^{-1} that relates star products to twisted convolutions.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"

namespace moyalkit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Antisymmetric bilinear form stored as its strict upper triangle (row-major),
// so M^T = -M holds by construction and theta(s, s) == 0 exactly. May be
// degenerate; the zero form switches the twist phase off.
class SkewForm {
public:
    SkewForm() = default;

    SkewForm(int dim, std::vector<double> upper) : dim_(dim), upper_(std::move(upper)) {
        if (dim < 1) throw Error(ErrorKind::InvalidArgument, "form dimension must be positive");
        if (upper_.size() != triangle_size(dim))
            throw Error(ErrorKind::DimensionMismatch,
                        "upper triangle of a " + std::to_string(dim) + "x" + std::to_string(dim) +
                            " form needs " + std::to_string(triangle_size(dim)) + " entries");
    }

    static SkewForm zero(int dim) { return SkewForm(dim, std::vector<double>(triangle_size(dim), 0.0)); }

    // Takes the strict upper triangle of m; m must be antisymmetric within rel_tol.
    static SkewForm from_matrix(const Mat& m, double rel_tol = 1e-12) {
        if (m.rows() != m.cols()) throw Error(ErrorKind::DimensionMismatch, "form matrix must be square");
        const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
        if ((m + m.transpose()).cwiseAbs().maxCoeff() > rel_tol * scale)
            throw Error(ErrorKind::InvalidArgument, "form matrix is not antisymmetric");
        const int d = static_cast<int>(m.rows());
        std::vector<double> up;
        up.reserve(triangle_size(d));
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) up.push_back(m(i, j));
        return SkewForm(d, std::move(up));
    }

    static std::size_t triangle_size(int dim) {
        return static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim - 1) / 2;
    }

    int dim() const { return dim_; }
    const std::vector<double>& upper() const { return upper_; }

    // Entry (i, j) of the matrix, i != j allowed in either order.
    double entry(int i, int j) const {
        if (i == j) return 0.0;
        if (i < j) return upper_[index(i, j)];
        return -upper_[index(j, i)];
    }

    Mat matrix() const {
        Mat m = Mat::Zero(dim_, dim_);
        for (int i = 0; i < dim_; ++i)
            for (int j = i + 1; j < dim_; ++j) {
                m(i, j) = upper_[index(i, j)];
                m(j, i) = -upper_[index(i, j)];
            }
        return m;
    }

    bool is_zero() const {
        for (double u : upper_)
            if (u != 0.0) return false;
        return true;
    }

    // theta(s, t) = sum_{i<j} M_ij (s_i t_j - s_j t_i).
    double operator()(std::span<const double> s, std::span<const double> t) const {
        if (static_cast<int>(s.size()) != dim_ || static_cast<int>(t.size()) != dim_)
            throw Error(ErrorKind::DimensionMismatch, "vector length does not match form dimension");
        double acc = 0.0;
        std::size_t k = 0;
        for (int i = 0; i < dim_; ++i)
            for (int j = i + 1; j < dim_; ++j, ++k) acc += upper_[k] * (s[i] * t[j] - s[j] * t[i]);
        return acc;
    }

    double operator()(const Vec& s, const Vec& t) const {
        return (*this)(std::span<const double>(s.data(), static_cast<std::size_t>(s.size())),
                       std::span<const double>(t.data(), static_cast<std::size_t>(t.size())));
    }

    SkewForm scaled(double factor) const {
        std::vector<double> up = upper_;
        for (double& u : up) u *= factor;
        return SkewForm(dim_, std::move(up));
    }

    friend bool operator==(const SkewForm&, const SkewForm&) = default;

private:
    std::size_t index(int i, int j) const {
        // offset of row i in the packed strict upper triangle, then column
        const auto d = static_cast<std::size_t>(dim_);
        const auto ii = static_cast<std::size_t>(i);
        return ii * d - ii * (ii + 1) / 2 + static_cast<std::size_t>(j - i - 1);
    }

    int dim_ = 0;
    std::vector<double> upper_;
};

// A nondegenerate skew form. Dimension is even and |det M| exceeds
// degeneracy_rel_tol * ||M||_F^d.
class SymplecticForm : public SkewForm {
public:
    static constexpr double degeneracy_rel_tol = 1e-12;

    SymplecticForm() = default;

    explicit SymplecticForm(SkewForm form) : SkewForm(std::move(form)) { validate(); }

    SymplecticForm(int dim, std::vector<double> upper) : SkewForm(dim, std::move(upper)) { validate(); }

    static SymplecticForm from_matrix(const Mat& m) { return SymplecticForm(SkewForm::from_matrix(m)); }

    double determinant() const { return matrix().determinant(); }

    Mat inverse() const { return matrix().inverse(); }

private:
    void validate() const {
        if (dim() % 2 != 0)
            throw Error(ErrorKind::NearSingular, "odd-dimensional skew forms are always degenerate");
        const Mat m = matrix();
        const double norm = m.norm();
        const double det = m.determinant();
        if (!(std::abs(det) > degeneracy_rel_tol * std::pow(norm, dim())))
            throw Error(ErrorKind::NearSingular, "form determinant below degeneracy tolerance");
    }
};

// hbar * J with J = [[0, I_n], [-I_n, 0]] on R^{2n}.
inline SymplecticForm make_standard_form(int n, double hbar = 1.0) {
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "half-dimension must be at least 1");
    if (!(hbar > 0.0)) throw Error(ErrorKind::InvalidArgument, "hbar must be positive");
    Mat m = Mat::Zero(2 * n, 2 * n);
    for (int k = 0; k < n; ++k) {
        m(k, n + k) = hbar;
        m(n + k, k) = -hbar;
    }
    return SymplecticForm::from_matrix(m);
}

inline double evaluate_form(const SkewForm& form, const Vec& s, const Vec& t) { return form(s, t); }

// -4 M^{-1}. An involution on forms; fixes 2J.
inline SymplecticForm dual_deformation(const SymplecticForm& form) {
    Mat inv = form.inverse();
    inv = -4.0 * inv;
    // the inverse of an antisymmetric matrix is antisymmetric; drop roundoff in the lower half
    const Mat skew = 0.5 * (inv - inv.transpose());
    return SymplecticForm::from_matrix(skew);
}

struct SymplecticBasisChange {
    Mat transform;           // S, columns (e_1..e_n, f_1..f_n)
    SymplecticForm target;   // unit-scale J
};

// Skew Gram-Schmidt with maximal pivoting: repeatedly pick the pair (v_i, v_j)
// of remaining vectors with the largest |theta(v_i, v_j)|, normalize it into a
// pair (e, f) with theta(e, f) = 1 and project both out of the rest.
inline SymplecticBasisChange symplectic_basis(const SymplecticForm& form) {
    const int d = form.dim();
    const int n = d / 2;
    const Mat m = form.matrix();
    const double scale = m.cwiseAbs().maxCoeff();
    auto theta = [&](const Vec& a, const Vec& b) { return a.dot(m * b); };

    std::vector<Vec> remaining;
    for (int i = 0; i < d; ++i) remaining.push_back(Vec::Unit(d, i));

    Mat s(d, d);
    for (int k = 0; k < n; ++k) {
        std::size_t bi = 0, bj = 1;
        double best = -1.0;
        for (std::size_t i = 0; i < remaining.size(); ++i)
            for (std::size_t j = i + 1; j < remaining.size(); ++j) {
                const double v = std::abs(theta(remaining[i], remaining[j]));
                if (v > best) {
                    best = v;
                    bi = i;
                    bj = j;
                }
            }
        if (!(best > 1e-12 * scale)) throw Error(ErrorKind::NearSingular, "symplectic basis pivot vanished");
        const Vec e = remaining[bi];
        const Vec f = remaining[bj] / theta(remaining[bi], remaining[bj]);
        std::vector<Vec> rest;
        for (std::size_t i = 0; i < remaining.size(); ++i) {
            if (i == bi || i == bj) continue;
            const Vec& w = remaining[i];
            rest.push_back(w - theta(w, f) * e + theta(w, e) * f);
        }
        remaining = std::move(rest);
        s.col(k) = e;
        s.col(n + k) = f;
    }
    return {s, make_standard_form(n, 1.0)};
}

}  // namespace moyalkit
