#pragma once

// Test-side reference values computed without the library's kernels: direct
// Riemann sums over closures, closed-form Gaussian integrals and polynomial
// Moyal products.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cd = std::complex<double>;
using Fn = std::function<cd(const Eigen::VectorXd&)>;

// Riemann sum of f over [-L, L)^d with n points per axis.
inline cd riemann(const Fn& f, int d, int n, double L) {
    const double h = 2.0 * L / n;
    std::vector<int> idx(d, 0);
    Eigen::VectorXd x(d);
    cd acc{};
    while (true) {
        for (int a = 0; a < d; ++a) x[a] = -L + idx[a] * h;
        acc += f(x);
        int a = d - 1;
        while (a >= 0 && ++idx[a] == n) idx[a--] = 0;
        if (a < 0) break;
    }
    return acc * std::pow(h, d);
}

// (g1 tw g2)(s) = int g1(t) g2(s - t) e^{(i/2) s.M t} dt by brute force.
inline cd twisted_convolution(const Fn& g1, const Fn& g2, const Eigen::MatrixXd& m, const Eigen::VectorXd& s, int n,
                              double L) {
    return riemann(
        [&](const Eigen::VectorXd& t) {
            const double phase = 0.5 * s.dot(m * t);
            return g1(t) * g2(s - t) * cd(std::cos(phase), std::sin(phase));
        },
        static_cast<int>(s.size()), n, L);
}

// int f(x) e^{-i x.k} dx
inline cd fourier(const Fn& f, const Eigen::VectorXd& k, int n, double L) {
    return riemann(
        [&](const Eigen::VectorXd& x) {
            const double phase = -x.dot(k);
            return f(x) * cd(std::cos(phase), std::sin(phase));
        },
        static_cast<int>(k.size()), n, L);
}

// int exp(-x.A x + b.x) dx for real symmetric positive A and complex b:
// pi^{d/2} det(A)^{-1/2} exp(b.A^{-1} b / 4).
inline cd gaussian_integral(const Eigen::MatrixXd& a, const Eigen::VectorXcd& b) {
    const int d = static_cast<int>(a.rows());
    const Eigen::MatrixXcd ainv = a.inverse().cast<cd>();
    const cd q = (b.transpose() * ainv * b)(0, 0);
    return std::pow(std::numbers::pi, 0.5 * d) / std::sqrt(a.determinant()) * std::exp(q / 4.0);
}

// Ground state of the oscillator in d = 2n phase dimensions, M = hbar J.
inline double ground_state(const Eigen::VectorXd& x, double hbar) {
    const int n = static_cast<int>(x.size()) / 2;
    return std::pow(2.0, n) * std::exp(-x.squaredNorm() / hbar);
}

// Moyal products of low-degree polynomials in (q, p) for M = hbar J, d = 2:
// f * g = fg + (i hbar / 2) {f, g} - (hbar^2 / 8) (f_qq g_pp - 2 f_qp g_qp + f_pp g_qq).
inline cd q_star_p(double q, double p, double hbar) { return q * p + cd(0.0, 0.5 * hbar); }
inline cd p_star_q(double q, double p, double hbar) { return q * p - cd(0.0, 0.5 * hbar); }
inline cd qq_star_pp(double q, double p, double hbar) {
    return q * q * p * p + cd(0.0, 2.0 * hbar) * q * p - 0.5 * hbar * hbar;
}

// Heisenberg group law on (alpha, s).
struct Group {
    double alpha;
    Eigen::VectorXd s;
};
inline Group multiply(const Group& a, const Group& b, const Eigen::MatrixXd& m) {
    return {a.alpha + b.alpha + 0.5 * a.s.dot(m * b.s), a.s + b.s};
}

}  // namespace oracle
