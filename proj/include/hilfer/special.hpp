#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "hilfer/errors.hpp"

namespace hilfer {

/// sin(pi*x) with exact integer range reduction (no catastrophic loss for
/// large |x|, exact zeros at integers).
inline double sinpi(double x) {
    double r = x - std::nearbyint(x);           // r in [-0.5, 0.5]
    double s = std::sin(M_PI * r);
    // nearbyint parity decides the sign flip
    double n = std::nearbyint(x);
    bool odd = std::fmod(std::fabs(n), 2.0) == 1.0;
    return odd ? -s : s;
}

/// 1/Gamma(y) for any real y, zero at the poles y = 0, -1, -2, ...
inline double rgamma(double y) {
    if (y > 0.0) {
        if (y > 171.61) return 0.0;  // 1/inf
        return 1.0 / std::tgamma(y);
    }
    if (y == std::floor(y)) return 0.0;  // pole
    // reflection: 1/Gamma(y) = Gamma(1-y) * sin(pi y) / pi
    double lg = std::lgamma(1.0 - y);
    double s = sinpi(y);
    double mag = lg + std::log(std::fabs(s) / M_PI);
    if (mag > 708.0) throw DomainError("rgamma: overflow at y=" + std::to_string(y));
    return std::copysign(std::exp(mag), s);
}

/// Euler beta function, positive arguments required.
inline double beta_fn(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
        throw DomainError("beta_fn: nonpositive argument (a=" + std::to_string(a) +
                          ", b=" + std::to_string(b) + ")");
    if (a + b < 170.0) return std::tgamma(a) * std::tgamma(b) / std::tgamma(a + b);
    return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

/// Radical-inverse Halton point, base must be prime.
inline double halton(std::uint64_t index, unsigned base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}

/// Deterministic low-discrepancy sampler: dimension d from the first primes,
/// seed enters as an index offset so distinct seeds give distinct but
/// reproducible streams.
class HaltonSampler {
public:
    explicit HaltonSampler(std::uint64_t seed, unsigned dims = 1)
        : offset_(seed * 7919 + 1), dims_(dims) {}

    std::vector<double> next() {
        static constexpr unsigned primes[] = {2,  3,  5,  7,  11, 13, 17, 19,
                                              23, 29, 31, 37, 41, 43, 47, 53};
        std::vector<double> p(dims_);
        for (unsigned d = 0; d < dims_; ++d) p[d] = halton(offset_ + count_, primes[d % 16]);
        ++count_;
        return p;
    }

    double next1() { return next()[0]; }

private:
    std::uint64_t offset_;
    unsigned dims_;
    std::uint64_t count_ = 0;
};

/// Golden-section maximum refinement on [a, b] for a unimodal-near-peak f.
inline double golden_section_max(const std::function<double(double)>& f, double a, double b,
                                 int iters = 80) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters && (b - a) > 1e-14 * (std::fabs(a) + std::fabs(b) + 1.0); ++i) {
        if (fc > fd) {
            b = d; d = c; fd = fc;
            c = b - gr * (b - a); fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + gr * (b - a); fd = f(d);
        }
    }
    double xm = 0.5 * (a + b);
    return std::max({fc, fd, f(xm)});
}

namespace detail {

/// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
struct GaussRule {
    std::vector<double> nodes, weights;
};

inline const GaussRule& gauss_legendre(int n) {
    static thread_local std::vector<GaussRule> cache(65);
    if (n < 1 || n > 64) throw DomainError("gauss_legendre: order out of range");
    GaussRule& r = cache[static_cast<std::size_t>(n)];
    if (!r.nodes.empty()) return r;
    r.nodes.resize(static_cast<std::size_t>(n));
    r.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1; p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-16) break;
        }
        r.nodes[static_cast<std::size_t>(i)] = -x;
        r.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        r.weights[static_cast<std::size_t>(i)] = w;
        r.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    return r;
}

/// Integrate f on [a,b] with an n-point Gauss-Legendre rule.
template <class F>
double gauss_integrate(F&& f, double a, double b, int n) {
    const GaussRule& r = gauss_legendre(n);
    double mid = 0.5 * (a + b), half = 0.5 * (b - a), s = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * f(mid + half * r.nodes[i]);
    return s * half;
}

}  // namespace detail
}  // namespace hilfer
