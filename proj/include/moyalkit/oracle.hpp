#pragma once

// Closed-form algebra of complex Gaussians f(x) = exp(-x.Ax + b.x + c) with
// A complex symmetric, Re A positive definite. Twisted convolution, Fourier
// transforms and the star product all map Gaussians to Gaussians.

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "grid.hpp"
#include "symplectic.hpp"

namespace moyalkit {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

namespace detail {

// Branch-consistent log det of a complex symmetric matrix with positive
// definite real part: LDL^T without pivoting, every pivot has Re D_k > 0, and
// the sum of principal logs continues log det analytically from real SPD.
inline cd log_det_accretive(const CMat& m) {
    const auto n = m.rows();
    CMat a = m;
    cd acc{};
    for (Eigen::Index k = 0; k < n; ++k) {
        const cd pivot = a(k, k);
        if (!(pivot.real() > 0.0))
            throw Error(ErrorKind::IndefiniteQuadratic, "quadratic form has a pivot with nonpositive real part");
        acc += std::log(pivot);
        for (Eigen::Index i = k + 1; i < n; ++i) {
            const cd l = a(i, k) / pivot;
            for (Eigen::Index j = k + 1; j < n; ++j) a(i, j) -= l * a(k, j);
        }
    }
    return acc;
}

inline void require_accretive(const CMat& m, const char* what) {
    Eigen::LLT<Mat> llt(m.real());
    if (llt.info() != Eigen::Success) throw Error(ErrorKind::IndefiniteQuadratic, what);
}

inline CMat symmetrized(const CMat& m) { return 0.5 * (m + m.transpose()); }

// Imaginary part folded into (-pi, pi].
inline cd wrap_phase(cd c) {
    double im = std::remainder(c.imag(), 2.0 * std::numbers::pi);
    if (im <= -std::numbers::pi) im += 2.0 * std::numbers::pi;
    return {c.real(), im};
}

}  // namespace detail

class GaussianSymbol {
public:
    GaussianSymbol() = default;

    GaussianSymbol(CMat a, CVec b, cd c) : a_(detail::symmetrized(a)), b_(std::move(b)), c_(detail::wrap_phase(c)) {
        if (a_.rows() != a_.cols() || a_.rows() != b_.size())
            throw Error(ErrorKind::DimensionMismatch, "Gaussian quadratic and linear parts differ in dimension");
        detail::require_accretive(a_, "Gaussian real quadratic part is not positive definite");
    }

    // exp(-|x - center|^2 / width^2) * amplitude with real data.
    static GaussianSymbol isotropic(const Vec& center, double width, cd amplitude = 1.0) {
        const auto d = center.size();
        const double k = 1.0 / (width * width);
        CMat a = CMat::Identity(d, d) * k;
        CVec b = (2.0 * k) * center.cast<cd>();
        cd c = -k * center.squaredNorm() + std::log(amplitude);
        return {a, b, c};
    }

    static GaussianSymbol from_upper(int d, const std::vector<cd>& upper, CVec b, cd c) {
        if (upper.size() != static_cast<std::size_t>(d * (d + 1) / 2))
            throw Error(ErrorKind::DimensionMismatch, "upper triangle of A has the wrong length");
        CMat a(d, d);
        std::size_t k = 0;
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j, ++k) a(i, j) = a(j, i) = upper[k];
        return {a, std::move(b), c};
    }

    int dim() const { return static_cast<int>(b_.size()); }
    const CMat& A() const { return a_; }
    const CVec& b() const { return b_; }
    cd c() const { return c_; }

    std::vector<cd> upper() const {
        std::vector<cd> up;
        for (int i = 0; i < dim(); ++i)
            for (int j = i; j < dim(); ++j) up.push_back(a_(i, j));
        return up;
    }

    cd exponent(std::span<const double> x) const {
        CVec xv(dim());
        for (int i = 0; i < dim(); ++i) xv[i] = x[i];
        return -(xv.transpose() * a_ * xv)(0, 0) + (b_.transpose() * xv)(0, 0) + c_;
    }

    cd operator()(std::span<const double> x) const { return std::exp(exponent(x)); }
    cd operator()(const Vec& x) const { return (*this)(std::span<const double>(x.data(), x.size())); }

    // Multiplies by lambda: c -> c + log lambda.
    GaussianSymbol scaled(cd lambda) const { return {a_, b_, c_ + std::log(lambda)}; }

    GaussianSymbol conj() const { return {a_.conjugate(), b_.conjugate(), std::conj(c_)}; }

    // Pointwise product: quadratics, linear parts and constants add.
    friend GaussianSymbol operator*(const GaussianSymbol& g1, const GaussianSymbol& g2) {
        return {g1.a_ + g2.a_, g1.b_ + g2.b_, g1.c_ + g2.c_};
    }

    // Field-level distance: max over entries of A, b and c (c compared modulo 2 pi i).
    friend double field_distance(const GaussianSymbol& g1, const GaussianSymbol& g2) {
        double e = (g1.a_ - g2.a_).cwiseAbs().maxCoeff();
        e = std::max(e, (g1.b_ - g2.b_).cwiseAbs().maxCoeff());
        e = std::max(e, std::abs(detail::wrap_phase(g1.c_ - g2.c_)));
        return e;
    }

private:
    CMat a_;
    CVec b_;
    cd c_;
};

// int g1(t) g2(s - t) e^{(i/2) theta(s,t)} dt. Writing the t-exponent as
// -t.Mt + (w0 + P s).t, M = A1 + A2, P = 2 A2 - (i/2) M_theta, the Gaussian
// integral pi^{d/2} det(M)^{-1/2} exp(w.M^{-1}w / 4) is collected in s.
inline GaussianSymbol gaussian_twisted_convolution(const GaussianSymbol& g1, const GaussianSymbol& g2,
                                                   const SkewForm& form) {
    const int d = g1.dim();
    if (g2.dim() != d || form.dim() != d)
        throw Error(ErrorKind::DimensionMismatch, "Gaussians and form differ in dimension");
    const CMat m = g1.A() + g2.A();
    detail::require_accretive(m, "sum of quadratic parts is not positive definite");
    const CMat theta = form.matrix().cast<cd>();
    const cd half_i(0.0, 0.5);
    const CMat p = 2.0 * g2.A() - half_i * theta;
    const CVec w0 = g1.b() - g2.b();
    const auto solver = m.partialPivLu();
    const CMat minv_p = solver.solve(p);
    const CVec minv_w0 = solver.solve(w0);
    const CMat a = g2.A() - 0.25 * (p.transpose() * minv_p);
    const CVec b = g2.b() + 0.5 * (p.transpose() * minv_w0);
    const cd c = g1.c() + g2.c() + 0.25 * (w0.transpose() * minv_w0)(0, 0) + 0.5 * d * std::log(std::numbers::pi) -
                 0.5 * detail::log_det_accretive(m);
    return {a, b, c};
}

// fhat(s) = int f(x) e^{-i x.s} dx.
inline GaussianSymbol gaussian_fourier(const GaussianSymbol& g) {
    const int d = g.dim();
    const auto solver = g.A().partialPivLu();
    const CMat ainv = solver.inverse();
    const CVec ainv_b = solver.solve(g.b());
    const cd c = g.c() + 0.25 * (g.b().transpose() * ainv_b)(0, 0) + 0.5 * d * std::log(std::numbers::pi) -
                 0.5 * detail::log_det_accretive(g.A());
    return {0.25 * ainv, cd(0.0, -0.5) * ainv_b, c};
}

// (2 pi)^{-d} int fhat(s) e^{+i x.s} ds.
inline GaussianSymbol gaussian_inverse_fourier(const GaussianSymbol& g) {
    const int d = g.dim();
    const auto solver = g.A().partialPivLu();
    const CMat ainv = solver.inverse();
    const CVec ainv_b = solver.solve(g.b());
    const cd c = g.c() + 0.25 * (g.b().transpose() * ainv_b)(0, 0) + 0.5 * d * std::log(std::numbers::pi) -
                 0.5 * detail::log_det_accretive(g.A()) - d * std::log(2.0 * std::numbers::pi);
    return {0.25 * ainv, cd(0.0, 0.5) * ainv_b, c};
}

// f1 * f2 = F^{-1}[ (2 pi)^{-d} fhat1 #theta fhat2 ].
inline GaussianSymbol gaussian_star(const GaussianSymbol& g1, const GaussianSymbol& g2, const SkewForm& form) {
    const GaussianSymbol conv = gaussian_twisted_convolution(gaussian_fourier(g1), gaussian_fourier(g2), form);
    const double log_norm = g1.dim() * std::log(2.0 * std::numbers::pi);
    return gaussian_inverse_fourier(GaussianSymbol(conv.A(), conv.b(), conv.c() - log_norm));
}

inline SampledSymbol gaussian_sample(const GaussianSymbol& g, const PhaseGrid& grid,
                                     double boundary_tol = default_boundary_tol) {
    if (g.dim() != grid.dim()) throw Error(ErrorKind::DimensionMismatch, "Gaussian and grid differ in dimension");
    return sample([&](std::span<const double> x) { return g(x); }, grid, boundary_tol);
}

}  // namespace moyalkit
