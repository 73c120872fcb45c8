#pragma once

// Numerical verification of the estimates behind the existence theory: the
// two convolution bounds and their Lipschitz companions, the contraction
// factor of the solution map, continuous dependence on the initial datum,
// the smoothing bounds of the operator families, and the Gronwall-based
// uniqueness structure. Every right-hand side is assembled from closed-form
// constants (beta bundles, empirical smoothing sups) - nothing is fitted to
// the left-hand side.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hilfer/gronwall.hpp"
#include "hilfer/mild_solver.hpp"
#include "hilfer/nonlinearity.hpp"
#include "hilfer/operator_model.hpp"

namespace hilfer {

struct EstimateSample {
    double u = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;  // rhs - lhs
};

struct EstimateReport {
    std::string name;
    std::vector<EstimateSample> samples;
    double worst_margin = std::numeric_limits<double>::infinity();
    bool passed = true;

    static double tolerance(double rhs) { return 1e-9 + 1e-6 * std::fabs(rhs); }

    void add(double u, double lhs, double rhs) {
        EstimateSample s{u, lhs, rhs, rhs - lhs};
        worst_margin = std::min(worst_margin, s.margin);
        if (s.margin < -tolerance(rhs)) passed = false;
        samples.push_back(s);
    }
    /// smallest margin normalized by the local rhs (tightness measure)
    double min_margin_over_rhs() const {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& s : samples)
            if (s.rhs > 0.0) m = std::min(m, s.margin / s.rhs);
        return m;
    }
};

namespace detail {

/// Running sup over (0, u] of s^{eps} ||zeta(s)||_{1+eps} on grid nodes.
inline std::vector<double> lambda_envelope(const TimeGrid& grid, const Eigen::MatrixXd& zeta,
                                           double eps, const SectorialModel& model) {
    std::vector<double> env(grid.points.size(), 0.0);
    double run = 0.0;
    for (std::size_t j = 1; j < grid.points.size(); ++j) {
        run = std::max(run, std::pow(grid.points[j], eps) *
                                theta_norm(zeta.col(static_cast<Eigen::Index>(j)),
                                           1.0 + eps, model));
        env[j] = run;
    }
    return env;
}

inline double sup_eps_norm(const TimeGrid& grid, const Eigen::MatrixXd& zeta, double eps,
                           const SectorialModel& model) {
    return lambda_envelope(grid, zeta, eps, model).back();
}

inline double kernel_theta(const MildProblem& prob, double theta, double reg) {
    double xmax = prob.model->eigenvalues.maxCoeff() *
                  std::pow(1.0, prob.ord.alpha);  // grids live in (0, tau0 <= 1]
    return theta_constant_kernel(prob.ord.alpha, 1.0 + theta - reg, std::max(xmax, 1.0));
}

}  // namespace detail

/// Lemma-2 style bound for the f convolution with the class constants of
/// prob.f_term: margins at every interior grid point.
inline EstimateReport lemma2_check(const MildProblem& prob, const TimeGrid& grid,
                                   const Eigen::MatrixXd& zeta, double theta) {
    prob.validate();
    const EpsRegularClass& c = prob.f_term.cls;
    if (!(theta >= 0.0 && theta < c.gamma_eps))
        throw DomainError("lemma2_check: need 0 <= theta < gamma_eps");
    const double alpha = prob.ord.alpha, gamma = prob.ord.gamma;
    const double theta_hat = detail::kernel_theta(prob, theta, c.gamma_eps);
    const double bundle = beta_bundle(c, theta, alpha, BundleKind::f_bundle);
    const double phi = c.C;

    LambdaMap lm(prob, grid);
    Eigen::MatrixXd conv = lm.f_convolution_all(zeta);
    std::vector<double> env = detail::lambda_envelope(grid, zeta, c.eps, *prob.model);

    EstimateReport rep;
    rep.name = "lemma2(theta=" + std::to_string(theta) + ")";
    for (std::size_t j = 1; j + 1 < grid.points.size(); ++j) {
        double u = grid.points[j];
        double lhs = std::pow(u, theta * gamma) *
                     theta_norm(conv.col(static_cast<Eigen::Index>(j)), 1.0 + theta,
                                *prob.model);
        double e1 = theta * gamma + alpha * (c.gamma_eps - theta) - c.rho * c.eps;
        double e2 = theta * gamma + alpha * (c.gamma_eps - theta) + c.q1s;
        double rhs = theta_hat * phi * bundle *
                     (std::pow(env[j], c.rho) * std::pow(u, e1) +
                      c.V(u) * std::pow(u, e2));
        rep.add(u, lhs, rhs);
    }
    return rep;
}

/// Lemma-3 style Lipschitz bound for the f convolution of two ball
/// trajectories; Gamma is the proof's final display.
inline EstimateReport lemma3_check(const MildProblem& prob, const TimeGrid& grid,
                                   const Eigen::MatrixXd& zeta_a,
                                   const Eigen::MatrixXd& zeta_b, double theta, double mu) {
    prob.validate();
    const EpsRegularClass& c = prob.f_term.cls;
    if (!(theta >= 0.0 && theta < c.gamma_eps))
        throw DomainError("lemma3_check: need 0 <= theta < gamma_eps");
    double na = detail::sup_eps_norm(grid, zeta_a, c.eps, *prob.model);
    double nb = detail::sup_eps_norm(grid, zeta_b, c.eps, *prob.model);
    if (na > mu * (1.0 + 1e-9) || nb > mu * (1.0 + 1e-9))
        throw BallViolation("lemma3_check: trajectory leaves the mu-ball");
    const double alpha = prob.ord.alpha, gamma = prob.ord.gamma;
    const double theta_hat = detail::kernel_theta(prob, theta, c.gamma_eps);
    const double bundle = beta_bundle(c, theta, alpha, BundleKind::f_bundle);
    const double phi = c.C;

    LambdaMap lm(prob, grid);
    Eigen::MatrixXd diff = lm.f_convolution_all(zeta_a) - lm.f_convolution_all(zeta_b);
    double sup_diff = detail::sup_eps_norm(grid, zeta_a - zeta_b, c.eps, *prob.model);

    EstimateReport rep;
    rep.name = "lemma3(theta=" + std::to_string(theta) + ")";
    for (std::size_t j = 1; j + 1 < grid.points.size(); ++j) {
        double u = grid.points[j];
        double lhs = std::pow(u, theta * gamma) *
                     theta_norm(diff.col(static_cast<Eigen::Index>(j)), 1.0 + theta,
                                *prob.model);
        double e1 = theta * gamma + alpha * (c.gamma_eps - theta) - c.rho * c.eps;
        double e2 = theta * gamma + alpha * (c.gamma_eps - theta) - c.eps + c.q1;
        double gamma_fn = theta_hat * phi * bundle *
                          (2.0 * std::pow(mu, c.rho - 1.0) * std::pow(u, e1) +
                           c.V(u) * std::pow(u, e2));
        rep.add(u, lhs, gamma_fn * sup_diff);
    }
    return rep;
}

/// Lemma-4 style bound for the double convolution of the memory term
/// (stated form; valid on horizons <= 1).
inline EstimateReport lemma4_check(const MildProblem& prob, const TimeGrid& grid,
                                   const Eigen::MatrixXd& zeta, double theta) {
    prob.validate();
    const EpsRegularClass& c = prob.g_term.cls;
    if (!(theta >= 0.0 && theta < c.gamma_eps))
        throw DomainError("lemma4_check: need 0 <= theta < eta");
    if (grid.tau0 > 1.0 + 1e-12)
        throw DomainError("lemma4_check: stated bound requires tau0 <= 1");
    const double alpha = prob.ord.alpha, gamma = prob.ord.gamma;
    const double theta_hat = detail::kernel_theta(prob, theta, c.gamma_eps);
    const double bundle = beta_bundle(c, theta, alpha, BundleKind::g_bundle);
    const double phi = c.C;
    const double inner_beta = beta_fn(1.0 + c.q1s, 1.0 + c.v);

    LambdaMap lm(prob, grid);
    Eigen::MatrixXd conv = lm.g_double_convolution_all(zeta);
    std::vector<double> env = detail::lambda_envelope(grid, zeta, c.eps, *prob.model);

    EstimateReport rep;
    rep.name = "lemma4(theta=" + std::to_string(theta) + ")";
    for (std::size_t j = 1; j + 1 < grid.points.size(); ++j) {
        double u = grid.points[j];
        double lhs = std::pow(u, theta * gamma) *
                     theta_norm(conv.col(static_cast<Eigen::Index>(j)), 1.0 + theta,
                                *prob.model);
        double e1 = theta * gamma + 1.0 + c.v - c.rho * c.eps;
        double e2 = theta * gamma + alpha + c.v + c.q1s + 1.0;
        double rhs = theta_hat * phi * bundle *
                     (std::pow(env[j], c.rho) / (1.0 + c.v - c.rho * c.eps) *
                          std::pow(u, e1) +
                      c.V(u) * inner_beta * std::pow(u, e2));
        rep.add(u, lhs, rhs);
    }
    return rep;
}

/// Lemma-5 style Lipschitz bound for the double convolution.
inline EstimateReport lemma5_check(const MildProblem& prob, const TimeGrid& grid,
                                   const Eigen::MatrixXd& zeta_a,
                                   const Eigen::MatrixXd& zeta_b, double theta, double mu) {
    prob.validate();
    const EpsRegularClass& c = prob.g_term.cls;
    if (!(theta >= 0.0 && theta < c.gamma_eps))
        throw DomainError("lemma5_check: need 0 <= theta < eta");
    double na = detail::sup_eps_norm(grid, zeta_a, c.eps, *prob.model);
    double nb = detail::sup_eps_norm(grid, zeta_b, c.eps, *prob.model);
    if (na > mu * (1.0 + 1e-9) || nb > mu * (1.0 + 1e-9))
        throw BallViolation("lemma5_check: trajectory leaves the mu-ball");
    const double alpha = prob.ord.alpha, gamma = prob.ord.gamma;
    const double theta_hat = detail::kernel_theta(prob, theta, c.gamma_eps);
    const double bundle = beta_bundle(c, theta, alpha, BundleKind::g_bundle);
    const double phi = c.C;
    const double inner_beta = beta_fn(1.0 + c.q1, 1.0 + c.v - c.eps);

    LambdaMap lm(prob, grid);
    Eigen::MatrixXd diff =
        lm.g_double_convolution_all(zeta_a) - lm.g_double_convolution_all(zeta_b);
    double sup_diff = detail::sup_eps_norm(grid, zeta_a - zeta_b, c.eps, *prob.model);

    EstimateReport rep;
    rep.name = "lemma5(theta=" + std::to_string(theta) + ")";
    for (std::size_t j = 1; j + 1 < grid.points.size(); ++j) {
        double u = grid.points[j];
        double lhs = std::pow(u, theta * gamma) *
                     theta_norm(diff.col(static_cast<Eigen::Index>(j)), 1.0 + theta,
                                *prob.model);
        double e1 = theta * gamma + 1.0 + c.v + alpha * (c.gamma_eps - theta) -
                    c.rho * c.eps;
        double e2 = theta * gamma + alpha * (c.gamma_eps - theta) + c.q1 - c.eps;
        double gamma2 = theta_hat * phi * bundle *
                        (2.0 * std::pow(mu, c.rho - 1.0) /
                             (1.0 + c.v - c.rho * c.eps) * std::pow(u, e1) +
                         c.V(u) * inner_beta * std::pow(u, e2));
        rep.add(u, lhs, gamma2 * sup_diff);
    }
    return rep;
}

/// Gamma_{theta,gamma}(u) and Gamma^2_{theta,gamma}(u) of the two Lipschitz
/// lemmas (used by the contraction and continuous-dependence constants).
inline double gamma_lip_f(const MildProblem& prob, double theta, double mu, double u) {
    const EpsRegularClass& c = prob.f_term.cls;
    const double alpha = prob.ord.alpha, gamma = prob.ord.gamma;
    double e1 = theta * gamma + alpha * (c.gamma_eps - theta) - c.rho * c.eps;
    double e2 = theta * gamma + alpha * (c.gamma_eps - theta) - c.eps + c.q1;
    return detail::kernel_theta(prob, theta, c.gamma_eps) * c.C *
           beta_bundle(c, theta, alpha, BundleKind::f_bundle) *
           (2.0 * std::pow(mu, c.rho - 1.0) * std::pow(u, e1) +
            c.V(u) * std::pow(u, e2));
}

inline double gamma_lip_g(const MildProblem& prob, double theta, double mu, double u) {
    const EpsRegularClass& c = prob.g_term.cls;
    const double alpha = prob.ord.alpha, gamma = prob.ord.gamma;
    double e1 = theta * gamma + 1.0 + c.v + alpha * (c.gamma_eps - theta) - c.rho * c.eps;
    double e2 = theta * gamma + alpha * (c.gamma_eps - theta) + c.q1 - c.eps;
    return detail::kernel_theta(prob, theta, c.gamma_eps) * c.C *
           beta_bundle(c, theta, alpha, BundleKind::g_bundle) *
           (2.0 * std::pow(mu, c.rho - 1.0) / (1.0 + c.v - c.rho * c.eps) *
                std::pow(u, e1) +
            c.V(u) * beta_fn(1.0 + c.q1, 1.0 + c.v - c.eps) * std::pow(u, e2));
}

/// Deterministic trajectory in the mu-ball: zeta(t) = scale t^{sigma} w.
inline Eigen::MatrixXd make_ball_trajectory(const TimeGrid& grid, const MildProblem& prob,
                                            double mu, std::uint64_t seed) {
    const auto dim = prob.model->dim();
    HaltonSampler hs(seed, static_cast<unsigned>(dim + 2));
    auto pt = hs.next();
    Eigen::VectorXd w(dim);
    for (Eigen::Index i = 0; i < dim; ++i) w(i) = 2.0 * pt[static_cast<std::size_t>(i)] - 1.0;
    double sigma = 0.5 * pt[static_cast<std::size_t>(dim)];
    double frac = 0.2 + 0.7 * pt[static_cast<std::size_t>(dim) + 1];
    Eigen::MatrixXd zeta(dim, static_cast<Eigen::Index>(grid.points.size()));
    zeta.col(0).setZero();
    for (std::size_t j = 1; j < grid.points.size(); ++j)
        zeta.col(static_cast<Eigen::Index>(j)) = std::pow(grid.points[j], sigma) * w;
    // scale into the ball in the eps-weighted sense used by the lemmas
    double sup = 0.0;
    for (double eps : {prob.f_term.cls.eps, prob.g_term.cls.eps})
        sup = std::max(sup, detail::sup_eps_norm(grid, zeta, eps, *prob.model));
    if (sup > 0.0) zeta *= mu * frac / sup;
    return zeta;
}

struct ContractionReport {
    std::vector<double> ratios;
    double max_ratio = 0.0;
    SmallnessResult smallness;
    bool passed = false;  // max ratio < 1/2 whenever the smallness check holds
};

/// Measured k(tau0) contraction factor of the map on random ball pairs.
inline ContractionReport contraction_check(const MildProblem& prob, const TimeGrid& grid,
                                           double mu, int n_pairs, std::uint64_t seed) {
    prob.validate();
    LambdaMap lm(prob, grid);
    ContractionReport rep;
    double theta_c = std::max(
        std::max(detail::kernel_theta(prob, prob.f_term.cls.eps, prob.f_term.cls.gamma_eps),
                 detail::kernel_theta(prob, prob.g_term.cls.eps, prob.g_term.cls.gamma_eps)),
        std::max(detail::kernel_theta(prob, prob.g_term.cls.eps, prob.f_term.cls.gamma_eps),
                 detail::kernel_theta(prob, prob.f_term.cls.eps, prob.g_term.cls.gamma_eps)));
    double phi = std::max(prob.f_term.cls.C, prob.g_term.cls.C);
    rep.smallness = smallness_check(mu, prob.f_term.cls, prob.g_term.cls, theta_c, phi,
                                    prob.ord.alpha);
    std::vector<double> eps_list{prob.f_term.cls.eps, prob.g_term.cls.eps};
    for (int p = 0; p < n_pairs; ++p) {
        Eigen::MatrixXd a = make_ball_trajectory(grid, prob, mu, seed + 2 * static_cast<std::uint64_t>(p));
        Eigen::MatrixXd b = make_ball_trajectory(grid, prob, mu, seed + 2 * static_cast<std::uint64_t>(p) + 1);
        double den = weighted_norm(grid, a - b, eps_list, prob.ord, *prob.model);
        if (den <= 0.0) continue;
        Eigen::MatrixXd dl = (lm.f_convolution_all(a) - lm.f_convolution_all(b)) +
                             (lm.g_double_convolution_all(a) - lm.g_double_convolution_all(b));
        double num = weighted_norm(grid, dl, eps_list, prob.ord, *prob.model);
        rep.ratios.push_back(num / den);
        rep.max_ratio = std::max(rep.max_ratio, num / den);
    }
    rep.passed = !rep.smallness.ok || rep.max_ratio < 0.5;
    return rep;
}

/// Continuous dependence: solves from zeta0 and from perturbed data, then
/// asserts the weighted difference bound with the constant from the proof's
/// final line. Theta is the empirical propagator sup over the evaluation
/// range (finite-dimensional analogue of the abstract constant).
inline EstimateReport continuous_dependence_check(const MildProblem& prob,
                                                  const TimeGrid& grid,
                                                  const Eigen::VectorXd& w0,
                                                  const std::vector<double>& theta_list,
                                                  double tol = 1e-10, int max_iter = 200) {
    prob.validate();
    MildProblem pert = prob;
    pert.zeta0 = w0;
    MildSolution sa = picard_solve(prob, grid, tol, max_iter);
    MildSolution sb = picard_solve(pert, grid, tol, max_iter);
    double dz = theta_norm(prob.zeta0 - w0, 1.0, *prob.model);

    double theta0 = 0.0;
    for (double th : theta_list) theta0 = std::max(theta0, th);
    // empirical propagator constant over the grid range and theta list
    const double alpha = prob.ord.alpha, gamma = prob.ord.gamma;
    MlfParams pg{alpha, gamma, 1e-13, 5.0, 400};
    double theta_prop = 0.0;
    for (double th : theta_list) {
        for (std::size_t j = 1; j < grid.points.size(); ++j) {
            double u = grid.points[j];
            double ua = std::pow(u, alpha);
            for (Eigen::Index m = 0; m < prob.model->dim(); ++m) {
                double lam = prob.model->eigenvalues(m);
                double val = std::pow(u, th * gamma + gamma - 1.0) * std::pow(lam, th) *
                             std::fabs(ml_global(pg, -ua * lam));
                theta_prop = std::max(theta_prop, val);
            }
        }
    }
    double mu = std::max({1e-12,
                          detail::sup_eps_norm(grid, sa.values, prob.f_term.cls.eps, *prob.model),
                          detail::sup_eps_norm(grid, sa.values, prob.g_term.cls.eps, *prob.model),
                          detail::sup_eps_norm(grid, sb.values, prob.f_term.cls.eps, *prob.model),
                          detail::sup_eps_norm(grid, sb.values, prob.g_term.cls.eps, *prob.model)});
    double sup_gamma = 0.0;
    for (double th : theta_list)
        for (std::size_t j = 1; j < grid.points.size(); ++j)
            sup_gamma = std::max(sup_gamma, gamma_lip_f(prob, th, mu, grid.points[j]) +
                                                gamma_lip_g(prob, th, mu, grid.points[j]));
    double c_const = theta_prop * (1.0 + 2.0 * sup_gamma);

    EstimateReport rep;
    rep.name = "continuous_dependence";
    for (double th : theta_list) {
        for (std::size_t j = 1; j + 1 < grid.points.size(); ++j) {
            double u = grid.points[j];
            double lhs = std::pow(u, th * gamma) *
                         theta_norm(sa.values.col(static_cast<Eigen::Index>(j)) -
                                        sb.values.col(static_cast<Eigen::Index>(j)),
                                    1.0 + th, *prob.model);
            rep.add(u, lhs, c_const * dz);
        }
    }
    return rep;
}

struct UniquenessReport {
    std::vector<int> levels;             // N values
    std::vector<double> disagreement;    // overlap rel. disagreement N vs 2N
    EstimateReport gronwall_structure;   // xi against its series bound
    bool passed = false;
};

/// Mesh-consistency/uniqueness: solutions on nested meshes agree on the
/// overlap with refinement-monotone disagreement, and the sup-norm
/// difference obeys the Gronwall structure of the uniqueness proof.
inline UniquenessReport uniqueness_check(const MildProblem& prob, double t1, double t2,
                                         const std::vector<int>& n_levels,
                                         double tol = 1e-10) {
    prob.validate();
    if (t1 > 1.0 + 1e-12 || t2 > 1.0 + 1e-12)
        throw DomainError("uniqueness_check: horizons must satisfy T <= 1");
    UniquenessReport rep;
    const double grade = TimeGrid::default_grade(prob.ord.alpha);
    double tmin = std::min(t1, t2);

    for (int n : n_levels) {
        MildSolution coarse = picard_solve(prob, TimeGrid::make(tmin, n, grade), tol);
        MildSolution fine = picard_solve(prob, TimeGrid::make(tmin, 2 * n, grade), tol);
        double worst = 0.0;
        for (int j = 1; j <= n; ++j) {
            double num = (coarse.values.col(j) - fine.values.col(2 * j)).norm();
            double den = fine.values.col(2 * j).norm();
            if (den > 1e-12) worst = std::max(worst, num / den);
        }
        rep.levels.push_back(n);
        rep.disagreement.push_back(worst);
    }

    // Gronwall structure on xi(u) = running sup of the overlap difference in
    // the 1+eps norm, measured between the two horizons' solutions
    const int n_ref = n_levels.back();
    MildSolution s1 = picard_solve(prob, TimeGrid::make(t1, n_ref, grade), tol);
    MildSolution s2 = picard_solve(prob, TimeGrid::make(t2, n_ref, grade), tol);
    const double eps = std::max(prob.f_term.cls.eps, prob.g_term.cls.eps);
    const double k_reg = std::min(prob.f_term.cls.gamma_eps, prob.g_term.cls.gamma_eps);
    const double a_g = prob.ord.alpha * (k_reg - eps);

    // compare on the shared prefix at the coarser horizon's nodes
    std::vector<double> ts, xi;
    double run = 0.0;
    const TimeGrid& gmin = (t1 <= t2) ? s1.grid : s2.grid;
    const MildSolution& smin = (t1 <= t2) ? s1 : s2;
    const MildSolution& smax = (t1 <= t2) ? s2 : s1;
    for (std::size_t j = 1; j < gmin.points.size(); ++j) {
        double u = gmin.points[j];
        // interpolate the longer-horizon solution at u
        const auto& tp = smax.grid.points;
        auto it = std::upper_bound(tp.begin(), tp.end(), u);
        std::size_t k = static_cast<std::size_t>(it - tp.begin());
        Eigen::VectorXd other;
        if (k == 0) {
            other = smax.values.col(0);
        } else if (k >= tp.size()) {
            other = smax.values.col(static_cast<Eigen::Index>(tp.size()) - 1);
        } else {
            double w = (u - tp[k - 1]) / (tp[k] - tp[k - 1]);
            other = (1.0 - w) * smax.values.col(static_cast<Eigen::Index>(k - 1)) +
                    w * smax.values.col(static_cast<Eigen::Index>(k));
        }
        run = std::max(run, theta_norm(smin.values.col(static_cast<Eigen::Index>(j)) - other,
                                       1.0 + eps, *prob.model));
        ts.push_back(u);
        xi.push_back(run);
    }
    // hypothesis constants per the uniqueness proof: xi <= v0 + 3 Theta Phi S
    // * int (u-s)^{a_g - 1} xi ds; v0 is the observed floor, S from the
    // solutions' sup norms over the window
    double sup_pow = 0.0;
    for (std::size_t j = 1; j < gmin.points.size(); ++j) {
        double n1 = theta_norm(smin.values.col(static_cast<Eigen::Index>(j)), 1.0 + eps,
                               *prob.model);
        sup_pow = std::max(sup_pow, 2.0 * std::pow(n1, std::max(prob.f_term.cls.rho,
                                                                prob.g_term.cls.rho) -
                                                           1.0));
    }
    double s_const = std::max(
        {sup_pow + prob.f_term.cls.delta,
         sup_pow / (1.0 + prob.g_term.cls.v),
         prob.g_term.cls.delta * beta_fn(1.0 + prob.g_term.cls.q1, 1.0 + prob.g_term.cls.v)});
    double theta_c = detail::kernel_theta(prob, eps, k_reg);
    double phi = std::max(prob.f_term.cls.C, prob.g_term.cls.C);
    double gmult = 3.0 * theta_c * phi * std::max(s_const, 1e-12) / std::tgamma(a_g);
    double v0 = *std::max_element(xi.begin(), xi.end());

    GronwallInstance inst;
    inst.alpha = a_g;
    inst.v.t.assign(ts.begin(), ts.end());
    inst.v.t.insert(inst.v.t.begin(), 0.0);
    inst.v.y.assign(ts.size() + 1, std::max(v0, 1e-300));
    inst.g.t = inst.v.t;
    inst.g.y.assign(ts.size() + 1, gmult);
    Sampled zx;
    zx.t = inst.v.t;
    zx.y = xi;
    zx.y.insert(zx.y.begin(), 0.0);
    rep.gronwall_structure = EstimateReport{};
    rep.gronwall_structure.name = "uniqueness_gronwall";
    auto grep = gronwall_verify(inst, zx, 250, 1e-3);
    for (std::size_t j = 0; j < grep.u.size(); ++j)
        rep.gronwall_structure.add(grep.u[j], zx.y[j + 1],
                                   zx.y[j + 1] + grep.margin_series[j]);
    bool dec = true;
    for (std::size_t i = 1; i < rep.disagreement.size(); ++i)
        dec = dec && rep.disagreement[i] < rep.disagreement[i - 1];
    rep.passed = grep.hypothesis_ok && rep.gronwall_structure.passed && dec &&
                 rep.disagreement[0] <= 5e-3;
    return rep;
}

/// Theorem-2.47/Remark smoothing bounds with empirical constants, over
/// deterministic random draws.
inline EstimateReport smoothing_check(const SectorialModel& model, double alpha,
                                      const std::vector<double>& beta_tilde_list,
                                      const std::vector<double>& u_grid, int n_x = 100,
                                      std::uint64_t seed = 11) {
    model.require_spectral();
    EstimateReport rep;
    rep.name = "smoothing_th2.47";
    const double xmax =
        model.eigenvalues.maxCoeff() *
        std::pow(*std::max_element(u_grid.begin(), u_grid.end()), alpha) * 1.001;
    MlfParams p1{alpha, 1.0, 1e-13, 5.0, 400};
    for (double bt : beta_tilde_list) {
        double hat1 = estimate_theta_constant(model, alpha, bt, u_grid);
        double theta_r = 0.5 * bt;  // remark display at theta = bt/2 and bt
        for (double th : {theta_r, bt}) {
            double hat_d1 =
                (1.0 + th - bt == 0.0) ? 1.0 : ml_weighted(p1, 1.0 + th - bt, std::max(xmax, 1.0));
            double hat_d2 = theta_constant_kernel(alpha, 1.0 + th - bt, std::max(xmax, 1.0));
            HaltonSampler hs(seed, static_cast<unsigned>(model.dim()));
            for (int s = 0; s < n_x; ++s) {
                auto pt = hs.next();
                Eigen::VectorXd x(model.dim());
                for (Eigen::Index i = 0; i < model.dim(); ++i)
                    x(i) = 2.0 * pt[static_cast<std::size_t>(i)] - 1.0;
                double nb = theta_norm(x, bt, model);
                for (double u : u_grid) {
                    if (th == bt) {
                        // theorem display needs the base norm on the right
                        double lhs = std::pow(u, alpha * bt) *
                                     theta_norm(ml_operator(alpha, 1.0, 0.0, u, model, x),
                                                bt, model);
                        rep.add(u, lhs, hat1 * x.norm());
                    }
                    // remark display 1
                    double lhs1 =
                        std::pow(u, alpha * (1.0 + th - bt)) *
                        theta_norm(ml_operator(alpha, 1.0, 0.0, u, model, x), 1.0 + th, model);
                    rep.add(u, lhs1, hat_d1 * nb);
                    // remark display 2 (the kernel family)
                    double lhs2 =
                        std::pow(u, alpha * (th - bt) + 1.0) *
                        theta_norm(ml_operator(alpha, alpha, alpha - 1.0, u, model, x),
                                   1.0 + th, model);
                    rep.add(u, lhs2, hat_d2 * nb);
                }
            }
        }
    }
    return rep;
}

/// Built-in verification problem: Dirichlet Laplacian model, power f and
/// forced memory g with smallness-friendly constants.
inline MildProblem make_builtin_problem(double alpha, double beta_t, int model_n,
                                        double c0_f = 1e-3, double c0_g = 1e-3,
                                        double tau0 = 1.0) {
    auto model = std::make_shared<SectorialModel>(build_dirichlet_laplacian(model_n, M_PI, 1.0));
    MildProblem p;
    p.ord = FracOrder(alpha, beta_t);
    p.model = model;
    p.zeta0 = Eigen::VectorXd::Zero(model_n);
    p.zeta0(0) = 1.0;

    EpsRegularClass f;
    f.eps = 0.1;
    f.rho = 2.0;
    f.gamma_eps = 0.8;
    f.q1 = -0.1;
    f.q1s = -0.2;
    f.v = 0.0;
    f.delta = 0.01;
    f.V = {0.01, 0.2, tau0};
    p.f_term = make_power_nonlinearity(*model, f, c0_f, tau0);

    EpsRegularClass g;
    g.eps = 0.05;
    g.rho = 2.0;
    g.gamma_eps = 0.9;
    g.q1 = -0.2;
    g.q1s = -0.2;
    g.v = -0.1;
    g.delta = 0.5;
    g.V = {0.5, 0.1, tau0};
    p.g_term = make_forced_nonlinearity(*model, g, c0_g, g.v + g.q1s + g.V.p,
                                        Eigen::VectorXd::Ones(model_n), tau0);
    return p;
}

}  // namespace hilfer
