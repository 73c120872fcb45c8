#pragma once

// Scalar Mittag-Leffler evaluation E_{alpha,beta}(z) for real arguments,
// tuned for the negative real axis where the defining series cancels
// catastrophically. Three regimes:
//   * |z| <= series_radius: the power series, summed in double-double or
//     MPFR precision chosen from an a-priori estimate of the largest term;
//   * large |x|: the algebraic asymptotic expansion in 1/x;
//   * in between: the Hankel contour of the reciprocal-Gamma kernel
//     collapsed onto the branch cut (a bounded real-line integrand, no
//     e^{+mu} roundoff amplification), after a recurrence reduction
//     E_{a,b+a}(z) = (E_{a,b}(z) - 1/Gamma(b))/z that brings the second
//     parameter into (1-a, 1].

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <vector>

#include <quadmath.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include "hilfer/detail/double_double.hpp"
#include "hilfer/errors.hpp"
#include "hilfer/special.hpp"

namespace hilfer {

struct MlfParams {
    double alpha = 0.5;        // series order, > 0
    double beta_p = 1.0;       // second parameter, > 0
    double tol = 1e-13;        // relative tolerance, in (0, 1e-2)
    double series_radius = 5.0;
    int max_terms = 400;

    void validate() const {
        if (!(alpha > 0.0)) throw DomainError("MlfParams: alpha must be > 0");
        if (!(beta_p > 0.0)) throw DomainError("MlfParams: beta_p must be > 0");
        if (!(tol > 0.0 && tol < 1e-2)) throw DomainError("MlfParams: tol must be in (0, 1e-2)");
        if (!(series_radius > 0.0)) throw DomainError("MlfParams: series_radius must be > 0");
        if (max_terms < 1) throw DomainError("MlfParams: max_terms must be >= 1");
    }
};

namespace detail {

using mp170 = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<170>,
                                            boost::multiprecision::et_off>;
using mp1030 = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<1030>,
                                             boost::multiprecision::et_off>;

// Reciprocal-Gamma series coefficients 1/Gamma(alpha*k + beta), cached per
// (alpha, beta) at the precisions the summation tiers need.
struct SeriesCoeffs {
    std::vector<dd> c_dd;        // float128-accurate, 0.0 once underflowed
    std::vector<mp170> c_mp;
    std::vector<mp1030> c_hp;

    void extend_dd(double a, double b, std::size_t upto) {
        for (std::size_t k = c_dd.size(); k < upto; ++k) {
            __float128 y = static_cast<__float128>(a) * static_cast<__float128>(k) +
                           static_cast<__float128>(b);
            __float128 c = expq(-lgammaq(y));
            double hi = static_cast<double>(c);
            double lo = static_cast<double>(c - static_cast<__float128>(hi));
            c_dd.push_back({hi, lo});
        }
    }
    template <class T>
    static void extend_mp(std::vector<T>& v, double a, double b, std::size_t upto) {
        for (std::size_t k = v.size(); k < upto; ++k) {
            T y = T(a) * static_cast<unsigned>(k) + T(b);
            v.push_back(exp(-lgamma(y)));
        }
    }
};

inline SeriesCoeffs& coeffs_for(double a, double b) {
    static std::map<std::pair<double, double>, std::unique_ptr<SeriesCoeffs>> cache;
    static std::shared_mutex mtx;
    const std::pair<double, double> key{a, b};
    {
        std::shared_lock lk(mtx);
        auto it = cache.find(key);
        if (it != cache.end()) return *it->second;
    }
    std::unique_lock lk(mtx);
    auto& slot = cache[key];
    if (!slot) slot = std::make_unique<SeriesCoeffs>();
    return *slot;
}

// Coefficient access must also be serialized because vectors grow in place.
inline std::mutex& coeffs_grow_mutex() {
    static std::mutex m;
    return m;
}

/// log of the largest series term |z|^k / Gamma(alpha k + beta) over k >= 0.
inline double series_log_peak(double a, double b, double ln_az, int cap) {
    if (!std::isfinite(ln_az)) return -std::numeric_limits<double>::infinity();  // z == 0
    auto f = [&](double k) { return k * ln_az - std::lgamma(a * k + b); };
    // unimodal in k; peak near k* with alpha*psi(alpha k + b) = ln|z|
    double kstar = (std::exp(ln_az / a) - b) / a;
    double best = f(0.0);
    for (double k : {kstar - 1.0, kstar, kstar + 1.0, static_cast<double>(cap)})
        if (k > 0.0 && k <= cap) best = std::max(best, f(k));
    return best;
}

/// Smallest k at which the term magnitude falls below exp(ln_target), or
/// cap+1 when that never happens within cap.
inline int series_k_stop(double a, double b, double ln_az, double ln_target, int cap) {
    if (!std::isfinite(ln_az)) return 1;
    auto f = [&](double k) { return k * ln_az - std::lgamma(a * k + b); };
    double kstar = std::max(0.0, (std::exp(ln_az / a) - b) / a);
    if (f(static_cast<double>(cap)) >= ln_target && kstar >= cap) return cap + 1;
    double lo = kstar, hi = static_cast<double>(cap);
    if (f(hi) >= ln_target) return cap + 1;
    for (int i = 0; i < 60; ++i) {
        double mid = 0.5 * (lo + hi);
        (f(mid) >= ln_target ? lo : hi) = mid;
    }
    return static_cast<int>(std::ceil(hi));
}

struct SeriesOutcome {
    double value = 0.0;
    bool converged = false;
    bool precision_ok = true;
    int terms = 0;
};

inline SeriesOutcome series_sum_dd(double a, double b, double z, double tol, int cap) {
    SeriesCoeffs& C = coeffs_for(a, b);
    {
        std::lock_guard lk(coeffs_grow_mutex());
        C.extend_dd(a, b, static_cast<std::size_t>(cap) + 1);
    }
    dd sum{0.0, 0.0}, xk{1.0, 0.0};
    double sum_abs = 0.0;
    SeriesOutcome out;
    for (int k = 0; k <= cap; ++k) {
        dd term = dd_mul(xk, C.c_dd[static_cast<std::size_t>(k)]);
        sum = dd_add(sum, term);
        sum_abs += std::fabs(term.hi);
        out.terms = k + 1;
        double tmag = std::fabs(dd_to_double(term));
        if (k >= 1 && tmag <= tol * std::fabs(dd_to_double(sum))) {
            out.converged = true;
            break;
        }
        xk = dd_mul(xk, z);
        if (std::fabs(xk.hi) > 1e290) break;  // factor overflow: not a dd case
    }
    out.value = dd_to_double(sum);
    // double-double carries ~31 safe digits; demand the cancellation left room
    if (!(sum_abs * 1e-30 <= 0.25 * tol * std::fabs(out.value) + 1e-310)) out.precision_ok = false;
    return out;
}

template <class T>
SeriesOutcome series_sum_mp(std::vector<T> SeriesCoeffs::*member, int digits, double a, double b,
                            double z, double tol, int cap) {
    SeriesCoeffs& C = coeffs_for(a, b);
    {
        std::lock_guard lk(coeffs_grow_mutex());
        SeriesCoeffs::extend_mp(C.*member, a, b, static_cast<std::size_t>(cap) + 1);
    }
    const std::vector<T>& c = C.*member;
    T sum = 0, xk = 1, zz = z;
    T peak = 0;
    SeriesOutcome out;
    for (int k = 0; k <= cap; ++k) {
        T term = xk * c[static_cast<std::size_t>(k)];
        sum += term;
        T tmag = abs(term);
        if (tmag > peak) peak = tmag;
        out.terms = k + 1;
        if (k >= 1 && tmag <= T(tol) * abs(sum)) {
            out.converged = true;
            break;
        }
        xk *= zz;
    }
    out.value = static_cast<double>(sum);
    if (out.converged && abs(sum) > 0) {
        double headroom = static_cast<double>(log10(peak / abs(sum)));
        if (headroom > digits - 12) out.precision_ok = false;
    }
    return out;
}

/// Core series evaluator; radius checks are the callers' business.
inline double series_core(double a, double b, double z, double tol, int cap) {
    if (z == 0.0) return rgamma(b);
    double ln_az = std::log(std::fabs(z));
    double peak = series_log_peak(a, b, ln_az, cap);
    double peak_digits = std::max(0.0, peak) / std::log(10.0);
    auto diverged = [&](int terms) -> DivergenceError {
        return DivergenceError("ml series: " + std::to_string(terms) +
                               " terms reached without meeting tol (alpha=" + std::to_string(a) +
                               ", beta=" + std::to_string(b) + ", z=" + std::to_string(z) + ")");
    };
    // factor-representability and cancellation budget decide the tier
    bool dd_ok = z > 0.0 || peak_digits < 24.0;
    if (dd_ok && static_cast<double>(cap) * std::fabs(ln_az) < 650.0 &&
        std::lgamma(a * cap + b) < 650.0) {
        SeriesOutcome r = series_sum_dd(a, b, z, tol, cap);
        if (r.converged && r.precision_ok) return r.value;
        if (!r.converged && r.precision_ok && std::fabs(z) <= 1e290) throw diverged(r.terms);
    }
    if (peak_digits <= 150.0) {
        SeriesOutcome r =
            series_sum_mp<mp170>(&SeriesCoeffs::c_mp, 170, a, b, z, tol, cap);
        if (r.converged && r.precision_ok) return r.value;
        if (!r.converged) throw diverged(r.terms);
    }
    SeriesOutcome r = series_sum_mp<mp1030>(&SeriesCoeffs::c_hp, 1030, a, b, z, tol, cap);
    if (r.converged && r.precision_ok) return r.value;
    if (!r.converged) throw diverged(r.terms);
    throw DivergenceError("ml series: cancellation exceeds 1000-digit working precision");
}

/// Asymptotic expansion E_{a,b}(-x) ~ sum_{k>=1} (-1)^{k+1} x^{-k}/Gamma(b-ak)
/// for x -> +inf. Returns nothing when the requested tolerance is out of
/// reach before the divergent tail sets in.
inline std::optional<double> asymptotic_tail(double a, double b, double x, double tol) {
    // Individual terms vanish where b - ak hits a pole of Gamma, so the
    // remainder is estimated from the next TWO terms, not one.
    auto term = [&](int k) -> double {
        double y = b - a * k;
        if (y < -170.0) return std::numeric_limits<double>::quiet_NaN();
        return (k % 2 == 1 ? 1.0 : -1.0) * std::pow(x, -static_cast<double>(k)) * rgamma(y);
    };
    double s = 0.0;
    double last_nonzero = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 166; ++k) {
        double t = term(k);
        if (std::isnan(t)) break;
        double mag = std::fabs(t);
        if (mag != 0.0) {
            if (mag > last_nonzero) break;  // divergent part reached
            last_nonzero = mag;
        }
        s += t;
        double t1 = term(k + 1), t2 = term(k + 2);
        if (std::isnan(t1) || std::isnan(t2)) break;
        double rem = std::max(std::fabs(t1), std::fabs(t2));
        if (rem <= 0.25 * tol * std::fabs(s) && std::fabs(s) > 0.0) return s;
    }
    return std::nullopt;
}

/// Branch-cut integral for E_{a,b}(-x), 0 < a < 1, 0 < b < 1 + a, x > 0:
///   (1/pi) int_0^inf e^{-s} s^{a-b} N(s)/D(s) ds,
///   N = s^a sin(pi b) + x sin(pi(b-a)),
///   D = (s^a + x cos(pi a))^2 + (x sin(pi a))^2.
inline double cut_integral(double a, double b, double x, double tol) {
    const double sb = sinpi(b), sba = sinpi(b - a);
    const double ca = std::cos(M_PI * a), sa = std::sin(M_PI * a);
    auto f = [&](double s) {
        double sa_pow = std::pow(s, a);
        double num = sa_pow * sb + x * sba;
        double t1 = sa_pow + x * ca, t2 = x * sa;
        double den = t1 * t1 + t2 * t2;
        return std::exp(-s) * std::pow(s, a - b) * num / den;
    };
    static thread_local boost::math::quadrature::tanh_sinh<double> ts;
    static thread_local boost::math::quadrature::exp_sinh<double> es;
    double qtol = std::max(1e-14, 0.02 * tol);
    double err1 = 0, err2 = 0, l1a = 0, l1b = 0;
    double part1 = ts.integrate(f, 0.0, 1.0, qtol, &err1, &l1a);
    double part2 = es.integrate([&](double s) { return f(s + 1.0); }, qtol, &err2, &l1b);
    double val = (part1 + part2) / M_PI;
    double scale = (std::fabs(part1) + std::fabs(part2)) / M_PI;
    if (err1 * l1a + err2 * l1b > 1e-8 * scale + 1e-300)
        throw ContourError("ml cut integral: quadrature error estimate too large");
    return val;
}

}  // namespace detail

/// Truncated power series per the module contract: sum until the term falls
/// below tol times the running sum, compensated accumulation, DivergenceError
/// at the term cap. Internally the summation precision is chosen from an
/// a-priori bound on the largest term so the result meets tol whenever the
/// series converges within the cap.
inline double ml_series(const MlfParams& p, double z) {
    p.validate();
    if (std::fabs(z) > p.series_radius * (1.0 + 1e-12))
        throw DomainError("ml_series: |z| exceeds series_radius");
    return detail::series_core(p.alpha, p.beta_p, z, p.tol, p.max_terms);
}

/// Series evaluation for nonnegative arguments with a generous internal cap
/// (no cancellation there). Used by the Gronwall bounds.
inline double ml_positive(double alpha, double beta_p, double z, double tol = 1e-13) {
    if (z < 0.0) throw DomainError("ml_positive: z must be >= 0");
    if (!(alpha > 0.0) || !(beta_p > 0.0)) throw DomainError("ml_positive: invalid parameters");
    if (std::pow(z, 1.0 / alpha) > 690.0)
        throw DivergenceError("ml_positive: result overflows double");
    return detail::series_core(alpha, beta_p, z, tol, 20000);
}

/// E_{alpha,beta_p}(x) for x <= 0, 0 < alpha <= 1, accurate to p.tol over
/// x in [-1e6, 0].
inline double ml_global(const MlfParams& p, double x) {
    p.validate();
    if (x > 0.0) throw DomainError("ml_global: x must be <= 0");
    if (!(p.alpha <= 1.0)) throw DomainError("ml_global: alpha must be in (0,1]");
    const double a = p.alpha, b = p.beta_p;
    if (x == 0.0) return rgamma(b);
    const double mag = -x;

    if (a == 1.0) {
        if (b == 1.0) return std::exp(x);
        if (b == 2.0) return -std::expm1(x) / mag;
        if (mag <= p.series_radius)
            return detail::series_core(a, b, x, p.tol, 4000);
        if (mag >= 50.0) {
            auto s = detail::asymptotic_tail(a, b, mag, p.tol);
            if (s) return *s;
        }
        // Kummer transform: E_{1,b}(-x) = e^{-x} M(b-1; b; x) / Gamma(b),
        // a single-signed tail that sums stably for moderate x.
        double m = 1.0, term = 1.0;
        for (int n = 0; n < 4000; ++n) {
            term *= (b - 1.0 + n) / (b + n) * mag / (n + 1.0);
            m += term;
            if (std::fabs(term) <= 1e-17 * std::fabs(m) && n > mag) break;
        }
        return std::exp(-mag) * m * rgamma(b);
    }

    // 0 < alpha < 1
    const int internal_cap = std::max(p.max_terms, 5000);
    if (mag <= p.series_radius) {
        double ln_az = std::log(mag);
        int kstop = detail::series_k_stop(a, b, ln_az, std::log(p.tol) - 40.0, internal_cap);
        double digits =
            std::max(0.0, detail::series_log_peak(a, b, ln_az, kstop)) / std::log(10.0);
        if (kstop <= internal_cap && digits <= 900.0)
            return detail::series_core(a, b, x, p.tol, internal_cap);
        // tiny alpha: the series is impractical even inside the radius
        // (falls through to the cut integral, valid for all x < 0)
    } else {
        // cheap extended series sometimes beats everything near alpha = 1
        double ln_az = std::log(mag);
        int kstop = detail::series_k_stop(a, b, ln_az, std::log(p.tol) - 40.0, 600);
        double digits =
            std::max(0.0, detail::series_log_peak(a, b, ln_az, kstop)) / std::log(10.0);
        if (a > 0.93 && kstop <= 600 && digits <= 150.0)
            return detail::series_core(a, b, x, p.tol, internal_cap);
        auto s = detail::asymptotic_tail(a, b, mag, p.tol);
        if (s) return *s;
    }

    // reduce the second parameter into (1-a, 1], integrate, climb back
    int n = 0;
    double blow = b;
    while (blow > 1.0 + 1e-12) {
        blow -= a;
        ++n;
    }
    if (!(blow > 0.0)) {
        // b - n*a dipped to <= 0 (b nearly an exact multiple); back off one step
        blow += a;
        --n;
    }
    double e = detail::cut_integral(a, blow, mag, p.tol);
    for (int i = 0; i < n; ++i) {
        e = (e - rgamma(blow)) / x;
        blow += a;
    }
    return e;
}

/// sup over [0, domain_max] of x^mu |E_{alpha,beta_p}(-x)|, by a log-spaced
/// scan refined with golden-section search around the scan maximum.
inline double ml_weighted(const MlfParams& p, double mu, double domain_max) {
    p.validate();
    if (mu < 0.0) throw DomainError("ml_weighted: mu must be >= 0");
    if (!(domain_max > 0.0)) throw DomainError("ml_weighted: domain_max must be > 0");
    auto w = [&](double xx) {
        double e = std::fabs(ml_global(p, -xx));
        return (xx == 0.0) ? (mu == 0.0 ? e : 0.0) : std::pow(xx, mu) * e;
    };
    double best = w(0.0);
    const int n = 1200;
    const double lo = domain_max * 1e-8;
    double best_x = 0.0;
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i)
        xs[static_cast<std::size_t>(i)] =
            lo * std::pow(domain_max / lo, static_cast<double>(i) / (n - 1));
    int best_i = -1;
    for (int i = 0; i < n; ++i) {
        double v = w(xs[static_cast<std::size_t>(i)]);
        if (v > best) {
            best = v;
            best_x = xs[static_cast<std::size_t>(i)];
            best_i = i;
        }
    }
    if (best_i >= 0) {
        double a = (best_i > 0) ? xs[static_cast<std::size_t>(best_i - 1)] : 0.0;
        double b = (best_i < n - 1) ? xs[static_cast<std::size_t>(best_i + 1)] : domain_max;
        best = std::max(best, golden_section_max(w, a, b));
    }
    (void)best_x;
    return best;
}

/// Piecewise-Chebyshev table of x -> E_{alpha,beta}(-x) on [0, xmax]:
/// uniform panels on [0, cut], octave panels beyond. Build cost is a few
/// hundred ml_global calls; lookups are a Clenshaw recurrence. Solver sweeps
/// are O(N^2 dim) lookups, which is why this exists.
class MlTable {
public:
    static constexpr int kDegree = 16;

    MlTable() = default;
    MlTable(double alpha, double beta, double xmax, double tol = 1e-13)
        : alpha_(alpha), beta_(beta), xmax_(std::max(xmax, 1.0)), cut_(5.0) {
        MlfParams p{alpha, beta, tol, 5.0, 400};
        n_uniform_ = 48;
        double x = cut_;
        edges_.push_back(cut_);
        while (x < xmax_) {
            x *= 1.5;
            edges_.push_back(std::min(x, xmax_ * (1.0 + 1e-12)));
        }
        const int panels = n_uniform_ + static_cast<int>(edges_.size()) - 1;
        coef_.assign(static_cast<std::size_t>(panels) * (kDegree + 1), 0.0);
        for (int pnl = 0; pnl < panels; ++pnl) {
            auto [a, b] = panel_bounds(pnl);
            double fv[kDegree + 1];
            for (int j = 0; j <= kDegree; ++j) {
                double t = std::cos(M_PI * (j + 0.5) / (kDegree + 1));
                double xx = 0.5 * (a + b) + 0.5 * (b - a) * t;
                fv[j] = ml_global(p, -xx);
            }
            for (int m = 0; m <= kDegree; ++m) {
                double s = 0.0;
                for (int j = 0; j <= kDegree; ++j)
                    s += fv[j] * std::cos(M_PI * m * (j + 0.5) / (kDegree + 1));
                coef_[static_cast<std::size_t>(pnl) * (kDegree + 1) + m] =
                    s * 2.0 / (kDegree + 1);
            }
        }
    }

    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    double xmax() const { return xmax_; }

    /// E_{alpha,beta}(-x); falls back to direct evaluation past xmax.
    double operator()(double x) const {
        if (x < 0.0) throw DomainError("MlTable: negative argument");
        if (x > xmax_) return ml_global(MlfParams{alpha_, beta_, 1e-13, 5.0, 400}, -x);
        int pnl;
        if (x <= cut_) {
            pnl = std::min(n_uniform_ - 1,
                           static_cast<int>(x * n_uniform_ / cut_));
        } else {
            int oct = 0;
            while (oct + 2 < static_cast<int>(edges_.size()) &&
                   x > edges_[static_cast<std::size_t>(oct) + 1])
                ++oct;
            pnl = n_uniform_ + oct;
        }
        auto [a, b] = panel_bounds(pnl);
        double t = (2.0 * x - (a + b)) / (b - a);
        const double* c = &coef_[static_cast<std::size_t>(pnl) * (kDegree + 1)];
        double b1 = 0.0, b2 = 0.0;
        for (int m = kDegree; m >= 1; --m) {
            double tmp = 2.0 * t * b1 - b2 + c[m];
            b2 = b1;
            b1 = tmp;
        }
        return t * b1 - b2 + 0.5 * c[0];
    }

private:
    std::pair<double, double> panel_bounds(int pnl) const {
        if (pnl < n_uniform_) {
            double w = cut_ / n_uniform_;
            return {pnl * w, (pnl + 1) * w};
        }
        std::size_t o = static_cast<std::size_t>(pnl - n_uniform_);
        return {edges_[o], edges_[o + 1]};
    }

    double alpha_ = 0.0, beta_ = 0.0, xmax_ = 0.0, cut_ = 5.0;
    int n_uniform_ = 0;
    std::vector<double> edges_;
    std::vector<double> coef_;
};

}  // namespace hilfer
