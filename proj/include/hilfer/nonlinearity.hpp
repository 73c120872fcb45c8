#pragma once

// The nonlinearity classes F1/F2: descriptors carrying the growth/Lipschitz
// exponents, built-in test nonlinearities whose membership constants are
// derived from spectral-power inequalities (and then re-checked by sampling),
// the beta-function constant bundles of the convolution estimates, and the
// smallness condition that sizes the contraction ball.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hilfer/errors.hpp"
#include "hilfer/operator_model.hpp"
#include "hilfer/special.hpp"

namespace hilfer {

/// Nondecreasing modulus V(u) = delta (u/u_ref)^p capped at delta;
/// vanishes at 0+, bounded by delta.
struct Modulus {
    double delta = 0.0;
    double p = 1.0;
    double u_ref = 1.0;

    double operator()(double u) const {
        if (delta == 0.0 || u <= 0.0) return 0.0;
        return delta * std::min(1.0, std::pow(u / u_ref, p));
    }
    void validate() const {
        if (!(delta >= 0.0)) throw ClassViolation("Modulus: delta must be >= 0");
        if (!(p > 0.0)) throw ClassViolation("Modulus: exponent must be > 0");
        if (!(u_ref > 0.0)) throw ClassViolation("Modulus: u_ref must be > 0");
    }
};

/// Descriptor of an F-class: (eps, rho, gamma_eps, q1, q1s, v, C, delta, V).
/// For the memory class F2 the parameters l, l* live in the q1/q1s slots and
/// gamma_eps plays the role of eta(eps2).
struct EpsRegularClass {
    double eps = 0.0;
    double rho = 2.0;
    double gamma_eps = 0.8;
    double q1 = 0.0;
    double q1s = 0.0;
    double v = 0.0;
    double C = 1.0;
    double delta = 0.0;
    Modulus V;

    void validate() const {
        if (!(eps >= 0.0)) throw ClassViolation("EpsRegularClass: eps must be >= 0");
        if (!(rho > 1.0)) throw ClassViolation("EpsRegularClass: rho must be > 1");
        if (!(rho * eps <= gamma_eps && gamma_eps < 1.0))
            throw ClassViolation("EpsRegularClass: need rho*eps <= gamma_eps < 1");
        if (!(v > rho * eps - 1.0 && v <= 0.0))
            throw ClassViolation("EpsRegularClass: need rho*eps - 1 < v <= 0");
        if (!(q1 >= -v - gamma_eps + eps && q1 <= 0.0))
            throw ClassViolation("EpsRegularClass: q1 outside [-v-gamma+eps, 0]");
        if (!(q1s >= -v - gamma_eps && q1s <= 0.0))
            throw ClassViolation("EpsRegularClass: q1* outside [-v-gamma, 0]");
        if (!(C > 0.0)) throw ClassViolation("EpsRegularClass: C must be > 0");
        if (!(delta >= 0.0)) throw ClassViolation("EpsRegularClass: delta must be >= 0");
        V.validate();
        if (V.delta > delta * (1.0 + 1e-12))
            throw ClassViolation("EpsRegularClass: modulus exceeds its declared delta");
        // sampled modulus checks: nondecreasing, <= delta (vanishing at 0+ is
        // structural: the parametric form with p > 0 guarantees it)
        double prev = 0.0;
        for (int i = 1; i <= 32; ++i) {
            double u = V.u_ref * i / 32.0;
            double val = V(u);
            if (val < prev - 1e-14) throw ClassViolation("EpsRegularClass: V not nondecreasing");
            if (val > delta * (1.0 + 1e-12)) throw ClassViolation("EpsRegularClass: V > delta");
            prev = val;
        }
    }

    double c_of(double u) const { return C * std::pow(u, v); }
};

/// Built-in test nonlinearities. eval lands in the gamma_eps scale; the
/// factories derive constants that make the class inequalities provable for
/// spectral power norms, then sampling re-checks them.
struct TestNonlinearity {
    enum class Kind { zero, power, forced, linear, linear_matrix };

    Kind kind = Kind::zero;
    double c0 = 0.0;
    double t_exp = 0.0;           // u^{t_exp} time factor
    Eigen::VectorXd direction;    // forced
    Eigen::MatrixXd B;            // linear_matrix
    EpsRegularClass cls;

    bool depends_on_state() const {
        return kind == Kind::power || kind == Kind::linear || kind == Kind::linear_matrix;
    }

    /// The u-independent state factor (eval = c0 u^{t_exp} * state_part).
    Eigen::VectorXd state_part(const Eigen::VectorXd& x, const SectorialModel& m) const {
        switch (kind) {
            case Kind::zero:
                return Eigen::VectorXd::Zero(m.dim());
            case Kind::power: {
                double n = theta_norm(x, 1.0 + cls.eps, m);
                return std::pow(n, cls.rho - 1.0) * x;
            }
            case Kind::forced:
                return direction;
            case Kind::linear:
                return x;
            case Kind::linear_matrix:
                return B * x;
        }
        return Eigen::VectorXd::Zero(m.dim());
    }

    Eigen::VectorXd eval(double u, const Eigen::VectorXd& x, const SectorialModel& m) const {
        if (kind == Kind::zero) return Eigen::VectorXd::Zero(m.dim());
        return c0 * std::pow(u, t_exp) * state_part(x, m);
    }
};

struct MembershipSample {
    double u = 0.0;
    Eigen::VectorXd x, y;
};

/// Deterministic samples: u log-spread over (0, u_max], x and y in the
/// radius-ball of B_{1+eps}.
inline std::vector<MembershipSample> make_membership_samples(const SectorialModel& m,
                                                             double eps, double u_max,
                                                             double radius, int count,
                                                             std::uint64_t seed) {
    std::vector<MembershipSample> out;
    HaltonSampler hs(seed, static_cast<unsigned>(2 * m.dim() + 1));
    for (int s = 0; s < count; ++s) {
        auto pt = hs.next();
        MembershipSample ms;
        ms.u = u_max * std::pow(10.0, -4.0 * pt[0]);
        ms.x.resize(m.dim());
        ms.y.resize(m.dim());
        for (Eigen::Index i = 0; i < m.dim(); ++i) {
            ms.x(i) = 2.0 * pt[static_cast<std::size_t>(1 + i)] - 1.0;
            ms.y(i) = 2.0 * pt[static_cast<std::size_t>(1 + m.dim() + i)] - 1.0;
        }
        double nx = theta_norm(ms.x, 1.0 + eps, m);
        double ny = theta_norm(ms.y, 1.0 + eps, m);
        if (nx > 0.0) ms.x *= radius * pt[0] / nx;
        if (ny > 0.0) ms.y *= radius * (1.0 - 0.5 * pt[0]) / ny;
        out.push_back(std::move(ms));
    }
    return out;
}

struct MembershipReport {
    double worst_lipschitz = 0.0;
    double worst_growth = 0.0;
    MembershipSample witness;
    bool passed = true;
};

/// Checks Lipschitz and growth inequalities of the class on every sample and
/// returns the worst-case ratios.
inline MembershipReport check_class_membership(const TestNonlinearity& f,
                                               const SectorialModel& m,
                                               const std::vector<MembershipSample>& samples) {
    f.cls.validate();
    MembershipReport rep;
    const EpsRegularClass& c = f.cls;
    for (const auto& s : samples) {
        double nx = theta_norm(s.x, 1.0 + c.eps, m);
        double ny = theta_norm(s.y, 1.0 + c.eps, m);
        double cu = c.c_of(s.u);
        Eigen::VectorXd fx = f.eval(s.u, s.x, m);
        Eigen::VectorXd fy = f.eval(s.u, s.y, m);
        double growth_den = cu * (std::pow(nx, c.rho) + c.V(s.u) * std::pow(s.u, c.q1s));
        double growth_num = theta_norm(fx, c.gamma_eps, m);
        if (growth_den > 0.0) {
            double r = growth_num / growth_den;
            if (r > rep.worst_growth) {
                rep.worst_growth = r;
                rep.witness = s;
            }
        } else if (growth_num > 1e-300) {
            rep.worst_growth = std::numeric_limits<double>::infinity();
            rep.witness = s;
        }
        double dxy = theta_norm(s.x - s.y, 1.0 + c.eps, m);
        if (dxy > 0.0) {
            double lip_den = cu * dxy *
                             (std::pow(nx, c.rho - 1.0) + std::pow(ny, c.rho - 1.0) +
                              c.V(s.u) * std::pow(s.u, c.q1));
            double lip_num = theta_norm(fx - fy, c.gamma_eps, m);
            if (lip_den > 0.0) {
                double r = lip_num / lip_den;
                if (r > rep.worst_lipschitz) {
                    rep.worst_lipschitz = r;
                    rep.witness = s;
                }
            } else if (lip_num > 1e-300) {
                rep.worst_lipschitz = std::numeric_limits<double>::infinity();
                rep.witness = s;
            }
        }
    }
    rep.passed = rep.worst_growth <= 1.0 + 1e-9 && rep.worst_lipschitz <= 1.0 + 1e-9;
    return rep;
}

namespace detail {

/// sup over the spectrum of lambda^{a} for a <= 0 (attained at the smallest
/// eigenvalue); the embedding constant of B_{1+eps} into B_{gamma}.
inline double embedding_factor(const SectorialModel& m, double expo) {
    return std::pow(m.sector_margin, expo);
}

inline void enforce_membership(TestNonlinearity& f, const SectorialModel& m,
                               double u_max, double radius, std::uint64_t seed) {
    auto samples = make_membership_samples(m, f.cls.eps, u_max, radius, 200, seed);
    auto rep = check_class_membership(f, m, samples);
    if (!rep.passed)
        throw ClassViolation("TestNonlinearity: class membership failed (growth ratio " +
                             std::to_string(rep.worst_growth) + ", lipschitz ratio " +
                             std::to_string(rep.worst_lipschitz) + ")");
}

}  // namespace detail

/// f(u,x) = c0 u^v ||x||_{1+eps}^{rho-1} x. Class C derived from the
/// embedding of B_{1+eps} into B_{gamma} and the norm-power Lipschitz bound.
inline TestNonlinearity make_power_nonlinearity(const SectorialModel& m, EpsRegularClass cls,
                                                double c0, double u_max = 1.0,
                                                double ball_radius = 2.0,
                                                std::uint64_t seed = 2024) {
    TestNonlinearity f;
    f.kind = TestNonlinearity::Kind::power;
    f.c0 = c0;
    f.t_exp = cls.v;
    double kappa = detail::embedding_factor(m, cls.gamma_eps - 1.0 - cls.eps);
    cls.C = std::fabs(c0) * kappa * cls.rho * (1.0 + 1e-9);
    f.cls = cls;
    f.cls.validate();
    detail::enforce_membership(f, m, u_max, ball_radius, seed);
    return f;
}

/// f(u,x) = c0 u^{t_exp} e, x-independent forcing. Membership needs the
/// modulus term to carry the forcing: t_exp >= v + q1s + V.p, with C sized
/// at the u_max endpoint.
inline TestNonlinearity make_forced_nonlinearity(const SectorialModel& m, EpsRegularClass cls,
                                                 double c0, double t_exp,
                                                 const Eigen::VectorXd& direction,
                                                 double u_max = 1.0,
                                                 std::uint64_t seed = 2025) {
    if (!(cls.delta > 0.0))
        throw ClassViolation("make_forced_nonlinearity: forcing needs a positive delta");
    double slack = t_exp - (cls.v + cls.q1s + cls.V.p);
    if (slack < -1e-12)
        throw ClassViolation(
            "make_forced_nonlinearity: t_exp < v + q1* + modulus exponent (unbounded ratio)");
    TestNonlinearity f;
    f.kind = TestNonlinearity::Kind::forced;
    f.c0 = c0;
    f.t_exp = t_exp;
    f.direction = direction;
    m.require_dim(direction.size());
    double e_norm = theta_norm(direction, cls.gamma_eps, m);
    cls.C = std::fabs(c0) * e_norm * std::pow(cls.V.u_ref, cls.V.p) / cls.delta *
                std::pow(u_max, slack) * (1.0 + 1e-9) +
            1e-300;
    f.cls = cls;
    f.cls.validate();
    detail::enforce_membership(f, m, u_max, 2.0, seed);
    return f;
}

/// g(u,x) = c0 u^v x (memory kernel). The rho-power denominator vanishes
/// faster than the numerator at x -> 0, so membership leans on the modulus
/// floor: without delta > 0 this is the definitional boundary case and is
/// rejected.
inline TestNonlinearity make_linear_nonlinearity(const SectorialModel& m, EpsRegularClass cls,
                                                 double c0, double u_max = 1.0,
                                                 double ball_radius = 2.0,
                                                 std::uint64_t seed = 2026) {
    TestNonlinearity f;
    f.kind = TestNonlinearity::Kind::linear;
    f.c0 = c0;
    f.t_exp = cls.v;
    double kappa = detail::embedding_factor(m, cls.gamma_eps - 1.0 - cls.eps);
    // floor of the modulus term over sampled u; x-ball radius bounds the rest
    double u_min = u_max * 1e-4;
    double vfloor = cls.V(u_min) * std::pow(u_max, std::min(0.0, cls.q1s)) *
                    std::pow(u_min, std::max(0.0, cls.q1s));
    // also the Lipschitz floor with q1
    double vfloor_l = cls.V(u_min) * std::pow(u_max, std::min(0.0, cls.q1)) *
                      std::pow(u_min, std::max(0.0, cls.q1));
    double floor = std::min(vfloor, vfloor_l);
    if (!(floor > 0.0))
        throw ClassViolation(
            "make_linear_nonlinearity: linear growth needs the modulus term (delta > 0)");
    // sup over ||x|| <= R of kappa ||x|| / (||x||^rho + floor)
    auto ratio = [&](double s) { return s / (std::pow(s, cls.rho) + floor); };
    double sstar = std::pow(floor / (cls.rho - 1.0), 1.0 / cls.rho);
    double worst = std::max(ratio(std::min(sstar, ball_radius)), ratio(ball_radius));
    cls.C = std::fabs(c0) * kappa * 2.0 * worst * (1.0 + 1e-9);
    f.cls = cls;
    f.cls.validate();
    detail::enforce_membership(f, m, u_max, ball_radius, seed);
    return f;
}

/// f(u,x) = B x with B commuting with the model (diagonal in its eigenbasis
/// or a scalar multiple); used by the classical-recovery runs.
inline TestNonlinearity make_matrix_nonlinearity(const SectorialModel& m, EpsRegularClass cls,
                                                 const Eigen::MatrixXd& B, double u_max = 1.0,
                                                 double ball_radius = 2.0,
                                                 std::uint64_t seed = 2027) {
    TestNonlinearity f;
    f.kind = TestNonlinearity::Kind::linear_matrix;
    f.c0 = 1.0;
    f.t_exp = 0.0;
    f.B = B;
    if (B.rows() != m.dim() || B.cols() != m.dim())
        throw DimensionError("make_matrix_nonlinearity: B dimension mismatch");
    if (!(cls.v == 0.0))
        throw ClassViolation("make_matrix_nonlinearity: time-independent map needs v = 0");
    double kappa = detail::embedding_factor(m, cls.gamma_eps - 1.0 - cls.eps);
    double u_min = u_max * 1e-4;
    double floor = std::min(cls.V(u_min) * std::pow(u_min, std::max(0.0, cls.q1s)),
                            cls.V(u_min) * std::pow(u_min, std::max(0.0, cls.q1)));
    if (!(floor > 0.0))
        throw ClassViolation("make_matrix_nonlinearity: needs the modulus term (delta > 0)");
    auto ratio = [&](double s) { return s / (std::pow(s, cls.rho) + floor); };
    double sstar = std::pow(floor / (cls.rho - 1.0), 1.0 / cls.rho);
    double worst = std::max(ratio(std::min(sstar, ball_radius)), ratio(ball_radius));
    cls.C = B.norm() * kappa * 2.0 * worst * (1.0 + 1e-9);
    f.cls = cls;
    f.cls.validate();
    detail::enforce_membership(f, m, u_max, ball_radius, seed);
    return f;
}

inline TestNonlinearity make_zero_nonlinearity(EpsRegularClass cls) {
    TestNonlinearity f;
    f.kind = TestNonlinearity::Kind::zero;
    f.cls = std::move(cls);
    f.cls.validate();
    return f;
}

enum class BundleKind { f_bundle, g_bundle };

/// Beta-function constant bundles of the convolution estimates. The f bundle
/// follows the printed display; the g bundle uses the beta arguments the
/// double-convolution proof actually produces (alpha-scaled first argument).
inline double beta_bundle(const EpsRegularClass& cls, double theta, double alpha,
                          BundleKind which) {
    cls.validate();
    if (!(theta < cls.gamma_eps))
        throw DomainError("beta_bundle: theta must be below the class regularity exponent");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("beta_bundle: alpha in (0,1]");
    const double a1 = alpha * (cls.gamma_eps - theta);
    auto B = [](double x, double y) {
        if (!(x > 0.0) || !(y > 0.0))
            throw DomainError("beta_bundle: nonpositive beta argument (class parameters "
                              "incompatible with theta)");
        return beta_fn(x, y);
    };
    if (which == BundleKind::f_bundle) {
        return std::max({B(a1, 1.0 - cls.rho * cls.eps), B(a1, 1.0 + cls.q1s),
                         B(a1, 1.0 + cls.q1 - cls.eps)});
    }
    return std::max({B(a1, 2.0 + cls.v - cls.rho * cls.eps),
                     B(a1, 2.0 + alpha + cls.v + cls.q1s), B(a1, 1.0 + cls.q1 - cls.eps)});
}

struct SmallnessResult {
    bool ok = false;
    double lhs_ball = 0.0;      // Theta Phi Btilde (mu^{rho2-1}/(1+v-rho2 eps2) + mu^{rho1-1})
    double lhs_modulus = 0.0;   // Theta Phi Btilde (delta1 + delta2 B(1+l*,1+v))
    double rhs = 0.0;           // mu / 8
    double b_tilde = 0.0;
};

/// The two smallness inequalities that size the contraction ball.
inline SmallnessResult smallness_check(double mu, const EpsRegularClass& f_cls,
                                       const EpsRegularClass& g_cls, double theta_const,
                                       double phi_const, double alpha) {
    if (!(mu > 0.0 && mu <= 1.0)) throw DomainError("smallness_check: mu must be in (0,1]");
    f_cls.validate();
    g_cls.validate();
    SmallnessResult r;
    r.b_tilde = std::max({beta_bundle(g_cls, g_cls.eps, alpha, BundleKind::g_bundle),
                          beta_bundle(g_cls, f_cls.eps, alpha, BundleKind::g_bundle),
                          beta_bundle(f_cls, g_cls.eps, alpha, BundleKind::f_bundle),
                          beta_bundle(f_cls, f_cls.eps, alpha, BundleKind::f_bundle),
                          beta_fn(1.0 + g_cls.q1, 1.0 + g_cls.v - g_cls.eps),
                          beta_fn(1.0 + g_cls.q1s, 1.0 + g_cls.v)});
    const double tp = theta_const * phi_const * r.b_tilde;
    r.lhs_ball = tp * (std::pow(mu, g_cls.rho - 1.0) / (1.0 + g_cls.v - g_cls.rho * g_cls.eps) +
                       std::pow(mu, f_cls.rho - 1.0));
    r.lhs_modulus =
        tp * (f_cls.delta + g_cls.delta * beta_fn(1.0 + g_cls.q1s, 1.0 + g_cls.v));
    r.rhs = mu / 8.0;
    r.ok = r.lhs_ball <= r.rhs && r.lhs_modulus <= r.rhs;
    return r;
}

}  // namespace hilfer
