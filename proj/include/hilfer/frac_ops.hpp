#pragma once

// psi-fractional integrals and psi-Hilfer derivatives of sampled functions.
// The weakly singular kernel is integrated exactly (moment by moment) against
// an interpolant of the data: piecewise linear in the psi-variable away from
// the left endpoint, piecewise power form near it where linear interpolation
// of blow-up data loses all relative accuracy. The interpolant is prepared
// once per sampled function so that evaluation at all mesh nodes costs one
// kernel moment per node pair.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "hilfer/errors.hpp"
#include "hilfer/special.hpp"

namespace hilfer {

struct PsiFunction {
    std::function<double(double)> psi;
    std::function<double(double)> dpsi;
    std::string label;

    /// Checks strict monotonicity on [a,b] and a positive, bounded
    /// derivative on the open interval; dpsi may vanish at the left
    /// endpoint (psi(u)=u^2 on [0,b]) but blowing up there is rejected.
    void validate(double a, double b, int n = 64) const {
        if (!(b > a)) throw DomainError("PsiFunction: empty interval");
        double prev = psi(a);
        double da = dpsi(a);
        if (!(da >= 0.0) || !std::isfinite(da))
            throw DomainError("PsiFunction '" + label + "' has dpsi < 0 or unbounded at the endpoint");
        for (int i = 1; i <= n; ++i) {
            double u = a + (b - a) * i / n;
            double v = psi(u);
            if (!(v > prev)) throw DomainError("PsiFunction '" + label + "' not increasing");
            double d = dpsi(u);
            if (!(d > 0.0) || !std::isfinite(d))
                throw DomainError("PsiFunction '" + label + "' has dpsi <= 0 or unbounded");
            prev = v;
        }
    }

    static PsiFunction identity() {
        return {[](double u) { return u; }, [](double) { return 1.0; }, "identity"};
    }
    static PsiFunction square() {
        return {[](double u) { return u * u; }, [](double u) { return 2.0 * u; }, "square"};
    }
    static PsiFunction log1p() {
        return {[](double u) { return std::log1p(u); },
                [](double u) { return 1.0 / (1.0 + u); },
                "log1p"};
    }
};

/// Order/type pair of the Hilfer derivative with the derived weight exponent
/// gamma = alpha + beta_t (1 - alpha).
struct FracOrder {
    double alpha;
    double beta_t;
    double gamma;

    FracOrder(double a, double bt) : alpha(a), beta_t(bt), gamma(a + bt * (1.0 - a)) {
        if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("FracOrder: alpha must be in (0,1]");
        if (!(beta_t >= 0.0 && beta_t <= 1.0))
            throw DomainError("FracOrder: beta_t must be in [0,1]");
    }
};

/// Sampled function on a strictly increasing mesh. values[0] may be
/// non-finite to flag data that blows up at the left endpoint; the
/// integrators then use a fitted power form on the early intervals.
struct Sampled {
    std::vector<double> t;
    std::vector<double> y;

    void validate() const {
        if (t.size() < 2 || t.size() != y.size())
            throw MeshError("Sampled: need >= 2 nodes with matching values");
        for (std::size_t i = 1; i < t.size(); ++i)
            if (!(t[i] > t[i - 1])) throw MeshError("Sampled: mesh not strictly increasing");
    }
};

namespace detail {

/// (w1^a - w2^a)/a for w1 >= w2 >= 0, stable when w2/w1 -> 1.
inline double moment0(double a, double w1, double w2) {
    if (w2 == 0.0) return std::pow(w1, a) / a;
    double r = w2 / w1;
    if (r > 0.5) return std::pow(w1, a) * (-std::expm1(a * std::log(r))) / a;
    return (std::pow(w1, a) - std::pow(w2, a)) / a;
}

struct PowerFit {
    double p = 0.0;      // exponent in (y - ya)^p
    double scale = 0.0;  // value at the reference node
    double ref = 0.0;    // y_ref - ya
    bool ok = false;
};

inline PowerFit fit_power(double ya, double y1, double f1, double y2, double f2) {
    PowerFit r;
    if (f1 == 0.0 || f2 == 0.0 || (f1 > 0) != (f2 > 0)) return r;
    double num = std::log(std::fabs(f2 / f1));
    double den = std::log((y2 - ya) / (y1 - ya));
    if (!(den > 0.0)) return r;
    r.p = std::clamp(num / den, -0.99, 8.0);
    r.scale = f1;
    r.ref = y1 - ya;
    r.ok = true;
    return r;
}

/// Interpolant of sampled data in the psi-variable, refined with geometric
/// sub-chords (power-interpolated values) on the steep left-end intervals.
struct PreparedInterp {
    double ya = 0.0;
    bool singular = false;
    PowerFit first_fit;             // models data on (ya, ry.front()] when singular
    std::vector<double> ry, rf;     // refined nodes/values; starts at ya for regular data
    std::vector<std::size_t> node_at;  // original node -> refined index
};

inline PreparedInterp prepare_interp(const PsiFunction& psi, const Sampled& f) {
    f.validate();
    const std::size_t n = f.t.size();
    PreparedInterp P;
    P.ya = psi.psi(f.t.front());
    P.singular = !std::isfinite(f.y[0]);
    P.node_at.assign(n, 0);

    std::vector<double> yi(n);
    for (std::size_t i = 0; i < n; ++i) yi[i] = psi.psi(f.t[i]);

    std::size_t start = 0;
    if (P.singular) {
        if (n < 3) throw MeshError("psi_frac_integral: singular data needs >= 3 nodes");
        P.first_fit = fit_power(P.ya, yi[1], f.y[1], yi[2], f.y[2]);
        if (!P.first_fit.ok) {
            // constant extension by the first finite value
            P.first_fit = {0.0, f.y[1], yi[1] - P.ya, true};
        }
        start = 1;
        P.node_at[0] = std::numeric_limits<std::size_t>::max();
    }
    P.ry.push_back(yi[start]);
    P.rf.push_back(P.singular ? f.y[1] : f.y[0]);
    P.node_at[start] = 0;

    for (std::size_t i = start; i + 1 < n; ++i) {
        double y1 = yi[i], y2 = yi[i + 1];
        double f1 = f.y[i], f2 = f.y[i + 1];
        double r1 = y1 - P.ya, r2 = y2 - P.ya;
        bool steep = P.singular && r1 > 0.0 && r2 > 1.0015 * r1;
        PowerFit pf;
        if (steep) pf = fit_power(P.ya, y1, f1, y2, f2);
        if (steep && pf.ok && std::fabs(pf.p) > 1e-12) {
            int m = std::max(1, static_cast<int>(std::ceil(std::log(r2 / r1) / 1.5e-3)));
            m = std::min(m, 1 << 15);
            const double step = std::exp(std::log(r2 / r1) / m);
            const double fstep = std::pow(step, pf.p);
            double rj = r1, fj = f1;
            for (int j = 1; j < m; ++j) {
                rj *= step;
                fj *= fstep;
                P.ry.push_back(P.ya + rj);
                P.rf.push_back(fj);
            }
        }
        P.ry.push_back(y2);
        P.rf.push_back(f2);
        P.node_at[i + 1] = P.ry.size() - 1;
    }
    return P;
}

/// Contribution of the modeled first interval (ya, min(y_end, Y)] to
/// int (Y-y)^{alpha-1} data(y) dy, with data = scale ((y-ya)/ref)^p.
inline double first_interval_piece(double alpha, const PreparedInterp& P, double Y) {
    if (!P.singular) return 0.0;
    const PowerFit& pf = P.first_fit;
    const double yend = std::min(P.ry.front(), Y);
    const double span = yend - P.ya;
    if (!(span > 0.0)) return 0.0;
    const double refp = std::pow(pf.ref, pf.p);
    if (Y <= P.ry.front() * (1.0 + 1e-15) && std::fabs(Y - P.ry.front()) <= 1e-12 * span) {
        // spans the full modeled interval up to the kernel singularity
        return pf.scale / refp * std::pow(span, alpha + pf.p) * beta_fn(alpha, pf.p + 1.0);
    }
    if (Y <= P.ry.front()) {
        return pf.scale / refp * std::pow(span, alpha + pf.p) * beta_fn(alpha, pf.p + 1.0);
    }
    // kernel regular on [ya, yend]: absorb the data singularity with
    // q = (y-ya)^{1+p}
    double e = 1.0 + pf.p;
    double q2 = std::pow(span, e);
    return pf.scale / refp / e *
           gauss_integrate(
               [&](double q) {
                   double y = P.ya + std::pow(q, 1.0 / e);
                   return std::pow(Y - y, alpha - 1.0);
               },
               0.0, q2, 32);
}

/// int_a^u kernel * interpolant using exact moments; refined_end indexes the
/// last refined node <= u; yu = psi(u), fu = interpolated value at u.
inline double eval_prepared(double alpha, const PreparedInterp& P, double Y,
                            std::size_t refined_end, double fu) {
    double acc = first_interval_piece(alpha, P, Y);
    // per-interval moments: differencing shared antiderivatives instead
    // would lose the entire moment to cancellation once dy << w
    double w_prev = Y - P.ry[0];
    for (std::size_t i = 1; i <= refined_end; ++i) {
        double w = std::max(0.0, Y - P.ry[i]);
        double dy = P.ry[i] - P.ry[i - 1];
        if (dy > 0.0) {
            double m0 = moment0(alpha, w_prev, w);
            double m1 = moment0(alpha + 1.0, w_prev, w);
            double c1 = (P.rf[i] - P.rf[i - 1]) / dy;
            acc += (P.rf[i - 1] + c1 * w_prev) * m0 - c1 * m1;
        }
        w_prev = w;
    }
    // partial piece [ry[refined_end], Y]
    if (Y > P.ry[refined_end] && refined_end + 1 < P.ry.size()) {
        double y1 = P.ry[refined_end];
        double m0 = moment0(alpha, Y - y1, 0.0);
        double m1 = moment0(alpha + 1.0, Y - y1, 0.0);
        double c1 = (fu - P.rf[refined_end]) / (Y - y1);
        acc += (P.rf[refined_end] + c1 * (Y - y1)) * m0 - c1 * m1;
    }
    return acc;
}

inline std::size_t refined_index_for(const PreparedInterp& P, double Y) {
    auto it = std::upper_bound(P.ry.begin(), P.ry.end(), Y);
    std::size_t k = static_cast<std::size_t>(it - P.ry.begin());
    return (k == 0) ? 0 : k - 1;
}

}  // namespace detail

namespace detail {

/// Integration core without the public (0,1] order restriction (the
/// Gronwall series needs orders alpha*k > 1; the moments hold for any
/// positive order).
inline double frac_integral_any(double alpha, const PsiFunction& psi, const Sampled& f,
                                double u);

}  // namespace detail

/// I^{alpha;psi} f(u) by product integration: the kernel
/// psi'(s)(psi(u)-psi(s))^{alpha-1} is integrated exactly against the
/// interpolant of f in the psi-variable.
inline double psi_frac_integral(double alpha, const PsiFunction& psi, const Sampled& f,
                                double u) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw DomainError("psi_frac_integral: alpha must be in (0,1]");
    return detail::frac_integral_any(alpha, psi, f, u);
}

inline double detail::frac_integral_any(double alpha, const PsiFunction& psi, const Sampled& f,
                                        double u) {
    f.validate();
    const double ta = f.t.front(), tb = f.t.back();
    const double span = tb - ta;
    if (u < ta - 1e-12 * span || u > tb + 1e-12 * span)
        throw MeshError("psi_frac_integral: u outside the sample range");
    u = std::clamp(u, ta, tb);
    if (u == ta) return 0.0;

    detail::PreparedInterp P = detail::prepare_interp(psi, f);
    double Y = psi.psi(u);
    std::size_t end = detail::refined_index_for(P, Y);
    double fu = 0.0;
    if (Y > P.ry[end] && end + 1 < P.ry.size()) {
        double w = (Y - P.ry[end]) / (P.ry[end + 1] - P.ry[end]);
        fu = (1.0 - w) * P.rf[end] + w * P.rf[end + 1];
    }
    return detail::eval_prepared(alpha, P, Y, end, fu) / std::tgamma(alpha);
}

/// I^{alpha;psi} f at every mesh node: the interpolant is prepared once, so
/// the total cost is one kernel moment per node pair.
inline std::vector<double> psi_frac_integral_all(double alpha, const PsiFunction& psi,
                                                 const Sampled& f) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw DomainError("psi_frac_integral_all: alpha must be in (0,1]");
    detail::PreparedInterp P = detail::prepare_interp(psi, f);
    const double rg = std::tgamma(alpha);
    std::vector<double> out(f.t.size(), 0.0);
    for (std::size_t i = 0; i < f.t.size(); ++i) {
        if (P.node_at[i] == std::numeric_limits<std::size_t>::max() || f.t[i] == f.t.front()) {
            out[i] = 0.0;
            continue;
        }
        double Y = psi.psi(f.t[i]);
        out[i] = detail::eval_prepared(alpha, P, Y, P.node_at[i], 0.0) / rg;
    }
    return out;
}

/// psi-Hilfer derivative I^{beta(1-alpha);psi} (1/psi' d/du) I^{(1-beta)(1-alpha);psi} f
/// at u: inner integral on the full mesh, centered differencing in the
/// psi-variable, outer integral by the same product rule.
inline double hilfer_derivative(const FracOrder& ord, const PsiFunction& psi, const Sampled& f,
                                double u) {
    f.validate();
    if (f.t.size() < 3) throw MeshError("hilfer_derivative: need >= 3 mesh points");
    const double a2 = (1.0 - ord.beta_t) * (1.0 - ord.alpha);  // inner order
    const double a1 = ord.beta_t * (1.0 - ord.alpha);          // outer order
    const std::size_t n = f.t.size();
    const bool singular_left = !std::isfinite(f.y[0]);

    std::vector<double> g;
    if (a2 < 1e-14) {
        g = f.y;
    } else {
        g = psi_frac_integral_all(a2, psi, f);
        if (singular_left) g[0] = std::numeric_limits<double>::quiet_NaN();
    }

    std::vector<double> yi(n), dg(n);
    for (std::size_t i = 0; i < n; ++i) yi[i] = psi.psi(f.t[i]);
    auto stencil = [&](std::size_t i0, std::size_t i1, std::size_t i2, double at) {
        double x0 = yi[i0], x1 = yi[i1], x2 = yi[i2];
        double l0 = (2.0 * at - x1 - x2) / ((x0 - x1) * (x0 - x2));
        double l1 = (2.0 * at - x0 - x2) / ((x1 - x0) * (x1 - x2));
        double l2 = (2.0 * at - x0 - x1) / ((x2 - x0) * (x2 - x1));
        return l0 * g[i0] + l1 * g[i1] + l2 * g[i2];
    };
    const bool g0_bad = !std::isfinite(g[0]);
    for (std::size_t i = 0; i < n; ++i) {
        if (i == 0)
            dg[i] = g0_bad ? std::numeric_limits<double>::quiet_NaN() : stencil(0, 1, 2, yi[0]);
        else if (i == 1 && g0_bad)
            dg[i] = stencil(1, 2, 3, yi[1]);
        else if (i == n - 1)
            dg[i] = stencil(n - 3, n - 2, n - 1, yi[n - 1]);
        else
            dg[i] = stencil(i - 1, i, i + 1, yi[i]);
    }

    if (a1 < 1e-14) {
        std::size_t k = static_cast<std::size_t>(
            std::upper_bound(f.t.begin(), f.t.end(), u) - f.t.begin());
        if (k == 0 || k > n) throw MeshError("hilfer_derivative: u outside mesh");
        if (k == n) return dg[n - 1];
        double w = (u - f.t[k - 1]) / (f.t[k] - f.t[k - 1]);
        double lo = dg[k - 1];
        if (!std::isfinite(lo)) return dg[k];
        return (1.0 - w) * lo + w * dg[k];
    }
    return psi_frac_integral(a1, psi, Sampled{f.t, dg}, u);
}

/// Richardson-extrapolated limit of I^{1-gamma} f(u) as u -> 0+, from the
/// three smallest positive mesh points below eps_extrap.
inline double rl_initial_functional(double gamma_, const Sampled& f, double eps_extrap) {
    if (!(gamma_ > 0.0 && gamma_ <= 1.0))
        throw DomainError("rl_initial_functional: gamma must be in (0,1]");
    f.validate();
    if (std::fabs(f.t.front()) > 1e-300)
        throw MeshError("rl_initial_functional: mesh must start at 0");
    std::vector<double> pts;
    for (std::size_t i = 1; i < f.t.size() && pts.size() < 3; ++i)
        if (f.t[i] < eps_extrap) pts.push_back(f.t[i]);
    if (pts.size() < 3)
        throw MeshError("rl_initial_functional: fewer than 3 mesh points below eps_extrap");

    PsiFunction id = PsiFunction::identity();
    double I1, I2, I3;
    if (gamma_ == 1.0) {
        I1 = f.y[1];
        I2 = f.y[2];
        I3 = f.y[3];
    } else {
        I1 = psi_frac_integral(1.0 - gamma_, id, f, pts[0]);
        I2 = psi_frac_integral(1.0 - gamma_, id, f, pts[1]);
        I3 = psi_frac_integral(1.0 - gamma_, id, f, pts[2]);
    }
    double d1 = I1 - I2, d2 = I2 - I3;
    if (d1 == 0.0 || d2 == 0.0) return I1;

    // model I(t) = L + C t^q on the three points; solve the ratio equation
    // for q, fall back to Aitken when it has no root in range
    double t1 = pts[0], t2 = pts[1], t3 = pts[2];
    auto ratio = [&](double q) {
        return (std::pow(t1, q) - std::pow(t2, q)) / (std::pow(t2, q) - std::pow(t3, q)) -
               d1 / d2;
    };
    double qlo = 0.05, qhi = 6.0;
    double rlo = ratio(qlo), rhi = ratio(qhi);
    if (rlo * rhi < 0.0) {
        for (int it = 0; it < 80; ++it) {
            double qm = 0.5 * (qlo + qhi);
            double rm = ratio(qm);
            if (rlo * rm <= 0.0) {
                qhi = qm;
                rhi = rm;
            } else {
                qlo = qm;
                rlo = rm;
            }
        }
        double q = 0.5 * (qlo + qhi);
        double C = d1 / (std::pow(t1, q) - std::pow(t2, q));
        return I1 - C * std::pow(t1, q);
    }
    double denom = I3 - 2.0 * I2 + I1;
    if (denom == 0.0) return I1;
    return I1 - d1 * d1 / denom;
}

}  // namespace hilfer
