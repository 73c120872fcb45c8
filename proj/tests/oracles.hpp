#pragma once

// Test-only reference computations. These stay independent of the library's
// evaluation paths: plain series summation at fixed high precision, direct
// adaptive quadrature, and classical reference schemes, each written against
// the defining formulas rather than the library internals.

#include <cmath>
#include <functional>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/multiprecision/mpfr.hpp>

namespace oracles {

using bigfloat = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<1200>,
                                               boost::multiprecision::et_off>;

/// E_{alpha,beta}(x) by brute series summation at 1200 decimal digits.
/// Usable for |x| up to ~10 at alpha >= 0.3 and up to ~30 at alpha >= 0.5.
inline double mlf_bigseries(double alpha, double beta, double x, int max_terms = 200000) {
    bigfloat sum = 0, xk = 1;
    const bigfloat z = x;
    const bigfloat cutoff("1e-60");
    for (int k = 0; k < max_terms; ++k) {
        bigfloat y = bigfloat(alpha) * k + bigfloat(beta);
        bigfloat term = xk * exp(-lgamma(y));
        sum += term;
        if (k > 2 && abs(term) < cutoff * abs(sum)) break;
        xk *= z;
    }
    return static_cast<double>(sum);
}

/// Leading terms of E_{alpha,beta}(-x) ~ sum (-1)^{k+1} x^{-k}/Gamma(beta-alpha k),
/// written directly from the expansion (reflection formula inline).
inline double mlf_asymptotic3(double alpha, double beta, double x) {
    auto rg = [](double y) {
        if (y > 0.0) return 1.0 / std::tgamma(y);
        if (y == std::floor(y)) return 0.0;
        return std::sin(M_PI * y) * std::tgamma(1.0 - y) / M_PI;
    };
    double s = 0.0, xk = 1.0 / x;
    for (int k = 1; k <= 3; ++k) {
        s += (k % 2 == 1 ? 1.0 : -1.0) * xk * rg(beta - alpha * k);
        xk /= x;
    }
    return s;
}

/// Adaptive quadrature of f over [a, b] (tanh-sinh; handles endpoint
/// singularities).
inline double quad(const std::function<double(double)>& f, double a, double b,
                   double tol = 1e-12) {
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate(f, a, b, tol);
}

/// Riemann-Liouville power rule: I^alpha u^mu = G(mu+1)/G(mu+1+alpha) u^{mu+alpha}.
inline double rl_integral_power(double alpha, double mu, double u) {
    return std::tgamma(mu + 1.0) / std::tgamma(mu + 1.0 + alpha) * std::pow(u, mu + alpha);
}

/// Caputo derivative of a sampled function by the classical L1 scheme on a
/// uniform mesh (order 2-alpha).
inline double caputo_l1(double alpha, const std::function<double(double)>& f, double u, int n) {
    double h = u / n;
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
        double w = std::pow(n - j, 1.0 - alpha) - std::pow(n - j - 1.0, 1.0 - alpha);
        s += w * (f((j + 1) * h) - f(j * h));
    }
    return s * std::pow(h, -alpha) / std::tgamma(2.0 - alpha);
}

/// Volterra equality case zeta(u) = 1 + int_0^u (u-s)^{alpha-1} zeta(s) ds,
/// solved by product-integration collocation with linear interpolation on a
/// graded mesh. Written from scratch (kernel carries no 1/Gamma factor).
inline std::vector<double> volterra_equality(double alpha, double umax, int n,
                                             double grade = 2.0) {
    std::vector<double> t(static_cast<std::size_t>(n) + 1), z(static_cast<std::size_t>(n) + 1);
    for (int j = 0; j <= n; ++j)
        t[static_cast<std::size_t>(j)] = umax * std::pow(static_cast<double>(j) / n, grade);
    z[0] = 1.0;
    for (int j = 1; j <= n; ++j) {
        double u = t[static_cast<std::size_t>(j)];
        double rhs = 1.0, self = 0.0;
        for (int i = 0; i < j; ++i) {
            double s1 = t[static_cast<std::size_t>(i)], s2 = t[static_cast<std::size_t>(i + 1)];
            double w1 = u - s1, w2 = u - s2;
            double m0 = (std::pow(w1, alpha) - std::pow(w2, alpha)) / alpha;
            double m1 = (std::pow(w1, alpha + 1.0) - std::pow(w2, alpha + 1.0)) / (alpha + 1.0);
            // int (u-s)^{a-1} [z1 + (z2-z1)(s-s1)/h] ds over [s1,s2]
            double h = s2 - s1;
            double c_z1 = m0 - (w1 * m0 - m1) / h;   // coefficient of z1... see below
            // rewrite: s - s1 = (u - s1) - (u - s) = w1 - w
            // integrand = w^{a-1} [z1 + (z2-z1)(w1 - w)/h]
            //           = w^{a-1} [z1 + (z2-z1) w1/h] - w^a (z2-z1)/h
            double a_const = (w1 / h) * m0 - m1 / h;  // multiplies (z2 - z1)
            (void)c_z1;
            double zi = z[static_cast<std::size_t>(i)];
            if (i + 1 < j) {
                double zi1 = z[static_cast<std::size_t>(i + 1)];
                rhs += zi * m0 + (zi1 - zi) * a_const;
            } else {
                // z_j unknown: zi*m0 + (z_j - zi)*a_const
                rhs += zi * m0 - zi * a_const;
                self = a_const;
            }
        }
        z[static_cast<std::size_t>(j)] = rhs / (1.0 - self);
    }
    return z;
}

}  // namespace oracles
