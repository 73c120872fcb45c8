#pragma once

// psi-fractional Gronwall machinery: the iterated-kernel series bound, its
// closed Mittag-Leffler form for nondecreasing v, and a verifier that checks
// the hypothesis inequality before asserting the conclusions. The series
// term k reduces to [g(u) Gamma(alpha)]^k I^{alpha k; psi} v(u), so both
// sides share one product-integration rule and one discretization error.

#include <cmath>
#include <vector>

#include "hilfer/errors.hpp"
#include "hilfer/frac_ops.hpp"
#include "hilfer/mlf.hpp"

namespace hilfer {

struct GronwallInstance {
    double alpha = 0.5;
    PsiFunction psi = PsiFunction::identity();
    Sampled v;  // nonnegative
    Sampled g;  // nonnegative, nondecreasing, on the same mesh as v

    double a() const { return v.t.front(); }
    double b() const { return v.t.back(); }

    void validate() const {
        if (!(alpha > 0.0 && alpha <= 1.0))
            throw DomainError("GronwallInstance: alpha must be in (0,1]");
        v.validate();
        g.validate();
        if (v.t != g.t) throw MeshError("GronwallInstance: v and g must share one mesh");
        for (double val : v.y)
            if (!(val >= 0.0)) throw DomainError("GronwallInstance: v must be nonnegative");
        double prev = -std::numeric_limits<double>::infinity();
        for (double val : g.y) {
            if (!(val >= 0.0)) throw DomainError("GronwallInstance: g must be nonnegative");
            if (val < prev - 1e-12 * (std::fabs(prev) + 1.0))
                throw DomainError("GronwallInstance: g must be nondecreasing");
            prev = std::max(prev, val);
        }
        psi.validate(a(), b());
    }

    double interp(const Sampled& f, double u) const {
        auto it = std::upper_bound(f.t.begin(), f.t.end(), u);
        std::size_t k = static_cast<std::size_t>(it - f.t.begin());
        if (k == 0) return f.y.front();
        if (k >= f.t.size()) return f.y.back();
        double w = (u - f.t[k - 1]) / (f.t[k] - f.t[k - 1]);
        return (1.0 - w) * f.y[k - 1] + w * f.y[k];
    }
};

/// v(u) + sum_k [g(u)Gamma(alpha)]^k I^{alpha k;psi} v(u), truncated when a
/// term drops below 1e-14 of the running total or k reaches kmax.
inline double gronwall_series_bound(const GronwallInstance& inst, double u, int kmax = 60) {
    inst.validate();
    if (!(u > inst.a() && u <= inst.b() + 1e-12 * (inst.b() - inst.a())))
        throw DomainError("gronwall_series_bound: u must lie in (a, b]");
    const double gu = inst.interp(inst.g, u);
    const double ga = std::tgamma(inst.alpha);
    double total = inst.interp(inst.v, u);
    double factor = 1.0;
    for (int k = 1; k <= kmax; ++k) {
        factor *= gu * ga;
        if (factor == 0.0) return total;
        double ik = detail::frac_integral_any(inst.alpha * k, inst.psi, inst.v, u);
        double term = factor * ik;
        total += term;
        if (std::fabs(term) <= 1e-14 * std::fabs(total)) return total;
        if (!std::isfinite(total))
            throw TruncationError("gronwall_series_bound: series overflowed");
    }
    throw TruncationError("gronwall_series_bound: kmax reached with non-negligible term");
}

/// Closed form v(u) E_alpha(g(u) Gamma(alpha) [psi(u)-psi(a)]^alpha),
/// requiring v nondecreasing.
inline double gronwall_ml_bound(const GronwallInstance& inst, double u) {
    inst.validate();
    double prev = -std::numeric_limits<double>::infinity();
    for (double val : inst.v.y) {
        if (val < prev - 1e-12 * (std::fabs(prev) + 1.0))
            throw MonotonicityError("gronwall_ml_bound: v must be nondecreasing");
        prev = std::max(prev, val);
    }
    const double span = inst.psi.psi(u) - inst.psi.psi(inst.a());
    const double arg =
        inst.interp(inst.g, u) * std::tgamma(inst.alpha) * std::pow(span, inst.alpha);
    return inst.interp(inst.v, u) * ml_positive(inst.alpha, 1.0, arg);
}

struct GronwallReport {
    bool hypothesis_ok = true;
    bool v_nondecreasing = true;
    std::vector<double> u;
    std::vector<double> hypothesis_slack;  // rhs - zeta, per point
    std::vector<double> margin_series;     // series bound - zeta
    std::vector<double> margin_ml;         // ml bound - zeta (empty unless v nondecreasing)
    double worst_margin = 0.0;
};

/// Checks the hypothesis zeta <= v + g * int psi'(psi(u)-psi(tau))^{a-1} zeta
/// pointwise (same quadrature as the bounds), then reports conclusion
/// margins. A hypothesis violation flags the report instead of asserting the
/// conclusion.
inline GronwallReport gronwall_verify(const GronwallInstance& inst, const Sampled& zeta,
                                      int kmax = 60, double hyp_tol_rel = 1e-6,
                                      double hyp_tol_abs = 1e-9) {
    inst.validate();
    zeta.validate();
    if (zeta.t != inst.v.t) throw MeshError("gronwall_verify: zeta must share the instance mesh");
    for (double val : zeta.y)
        if (!(val >= 0.0)) throw DomainError("gronwall_verify: zeta must be nonnegative");

    GronwallReport rep;
    {
        double prev = -std::numeric_limits<double>::infinity();
        for (double val : inst.v.y) {
            if (val < prev - 1e-12 * (std::fabs(prev) + 1.0)) rep.v_nondecreasing = false;
            prev = std::max(prev, val);
        }
    }
    const double ga = std::tgamma(inst.alpha);
    std::vector<double> izeta = psi_frac_integral_all(inst.alpha, inst.psi, zeta);
    rep.worst_margin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j < zeta.t.size(); ++j) {
        double u = zeta.t[j];
        double rhs_hyp = inst.v.y[j] + inst.g.y[j] * ga * izeta[j];
        double slack = rhs_hyp - zeta.y[j];
        rep.u.push_back(u);
        rep.hypothesis_slack.push_back(slack);
        if (slack < -(hyp_tol_abs + hyp_tol_rel * std::fabs(rhs_hyp))) rep.hypothesis_ok = false;
        double ms = gronwall_series_bound(inst, u, kmax) - zeta.y[j];
        rep.margin_series.push_back(ms);
        rep.worst_margin = std::min(rep.worst_margin, ms);
        if (rep.v_nondecreasing) {
            double mm = gronwall_ml_bound(inst, u) - zeta.y[j];
            rep.margin_ml.push_back(mm);
        }
    }
    return rep;
}

}  // namespace hilfer
