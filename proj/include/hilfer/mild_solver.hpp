#pragma once

// Discretization of the mild-solution map
//   Lambda zeta(u) = u^{gamma-1} E_{alpha,gamma}(-u^alpha A) zeta0
//     + int_0^u (u-s)^{alpha-1} E_{alpha,alpha}(-(u-s)^alpha A)
//           [ f(s, zeta(s)) + int_0^s g(s-r, zeta(r)) dr ] ds
// on a graded mesh, solved by Picard iteration in the weighted sup norm.
// The singular kernel is integrated exactly per eigen-mode: the primitive of
// (u-s)^{alpha-1} E_{alpha,alpha}(-lambda (u-s)^alpha) is
// -(u-s)^alpha E_{alpha,alpha+1}(-lambda (u-s)^alpha), one series order up.

#include <cmath>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "hilfer/detail/parallel.hpp"
#include "hilfer/errors.hpp"
#include "hilfer/frac_ops.hpp"
#include "hilfer/mlf.hpp"
#include "hilfer/nonlinearity.hpp"
#include "hilfer/operator_model.hpp"

namespace hilfer {

struct TimeGrid {
    double tau0 = 1.0;
    int N = 256;
    double r_grade = 2.0;
    std::vector<double> points;  // t_j = tau0 (j/N)^r

    static TimeGrid make(double tau0, int n, double r_grade) {
        if (!(tau0 > 0.0)) throw DomainError("TimeGrid: tau0 must be > 0");
        if (n < 2) throw DomainError("TimeGrid: need at least 2 intervals");
        if (!(r_grade >= 1.0)) throw DomainError("TimeGrid: grading exponent must be >= 1");
        TimeGrid g;
        g.tau0 = tau0;
        g.N = n;
        g.r_grade = r_grade;
        g.points.resize(static_cast<std::size_t>(n) + 1);
        for (int j = 0; j <= n; ++j)
            g.points[static_cast<std::size_t>(j)] =
                tau0 * std::pow(static_cast<double>(j) / n, r_grade);
        return g;
    }

    /// Default grading resolves both the u^{gamma-1} layer and the kernel.
    static double default_grade(double alpha) { return std::max(2.0, 2.0 / alpha); }
};

struct MildProblem {
    FracOrder ord{0.5, 1.0};
    std::shared_ptr<const SectorialModel> model;
    TestNonlinearity f_term;
    TestNonlinearity g_term;
    Eigen::VectorXd zeta0;
    double mu_ball = 1.0;

    void validate() const {
        if (!model) throw DomainError("MildProblem: missing model");
        model->require_spectral();
        model->require_dim(zeta0.size());
        if (!zeta0.allFinite()) throw DomainError("MildProblem: zeta0 must be finite");
        double regs = std::min(f_term.cls.gamma_eps, g_term.cls.gamma_eps);
        double epss = std::max(f_term.cls.eps, g_term.cls.eps);
        if (!(regs > epss))
            throw ClassViolation(
                "MildProblem: need min{gamma_eps, eta} > max{eps1, eps2}");
        if (g_term.kind == TestNonlinearity::Kind::forced && !(g_term.t_exp > -1.0))
            throw DomainError("MildProblem: memory kernel exponent must be > -1");
    }

    /// Order of the Riemann-Liouville functional fixing the initial datum.
    double initial_functional_order() const { return 1.0 - ord.gamma; }
};

struct IterationRecord {
    int iter = 0;
    double ratio = 0.0;     // residual_k / residual_{k-1}
    double residual = 0.0;  // weighted norm of the Picard increment
};

struct MildSolution {
    TimeGrid grid;
    Eigen::MatrixXd values;  // dim x (N+1); column 0 holds the weighted limit
                             // lim u^{1-gamma} zeta(u) = zeta0 / Gamma(gamma)
    std::vector<double> eps_list;
    std::vector<double> weighted_norms;  // per epsilon
    std::vector<IterationRecord> trace;
    bool converged = false;
    bool ball_warning = false;
};

/// max_i sup_{j>=1} t_j^{eps_i gamma} || zeta(t_j) ||_{B_{1+eps_i}}.
inline double weighted_norm(const TimeGrid& grid, const Eigen::MatrixXd& zeta,
                            const std::vector<double>& eps_list, const FracOrder& ord,
                            const SectorialModel& model) {
    if (eps_list.empty()) throw DomainError("weighted_norm: eps_list must be nonempty");
    if (zeta.cols() != static_cast<Eigen::Index>(grid.points.size()))
        throw DimensionError("weighted_norm: value count does not match the grid");
    double out = 0.0;
    for (double eps : eps_list) {
        for (std::size_t j = 1; j < grid.points.size(); ++j) {
            double w = std::pow(grid.points[j], eps * ord.gamma);
            out = std::max(out,
                           w * theta_norm(zeta.col(static_cast<Eigen::Index>(j)), 1.0 + eps,
                                          model));
        }
    }
    return out;
}

/// u^{gamma-1} E_{alpha,gamma}(-u^alpha A) zeta0.
inline Eigen::VectorXd homogeneous_term(const MildProblem& prob, double u) {
    prob.validate();
    if (u == 0.0) {
        if (prob.ord.gamma == 1.0) return prob.zeta0;
        throw SingularityError("homogeneous_term: u = 0 with gamma < 1");
    }
    if (!(u > 0.0)) throw DomainError("homogeneous_term: u must be >= 0");
    return ml_operator(prob.ord.alpha, prob.ord.gamma, prob.ord.gamma - 1.0, u,
                       *prob.model, prob.zeta0);
}

/// Discrete Lambda on a fixed grid: tables, eigen transforms, and the
/// per-mode exact kernel moments are prepared once.
class LambdaMap {
public:
    LambdaMap(const MildProblem& prob, const TimeGrid& grid)
        : prob_(prob), grid_(grid), model_(*prob.model) {
        prob_.validate();
        const double alpha = prob_.ord.alpha;
        const double lam_max = model_.eigenvalues.maxCoeff();
        const double xmax = lam_max * std::pow(grid_.tau0, alpha) * 1.01;
        tab_gamma_ = MlTable(alpha, prob_.ord.gamma, xmax);
        tab_kernel_ = MlTable(alpha, alpha, xmax);
        tab_p1_ = MlTable(alpha, alpha + 1.0, xmax);
        tab_p2_ = MlTable(alpha, alpha + 2.0, xmax);
    }

    const TimeGrid& grid() const { return grid_; }
    const MildProblem& problem() const { return prob_; }

    /// Homogeneous term at every grid point (weighted limit in column 0).
    Eigen::MatrixXd homogeneous_all() const {
        const auto n = static_cast<Eigen::Index>(grid_.points.size());
        Eigen::MatrixXd out(model_.dim(), n);
        Eigen::VectorXd c0 = model_.eigenvectors.transpose() * prob_.zeta0;
        const double alpha = prob_.ord.alpha, gamma = prob_.ord.gamma;
        for (Eigen::Index j = 1; j < n; ++j) {
            double u = grid_.points[static_cast<std::size_t>(j)];
            double pre = std::pow(u, gamma - 1.0);
            double ua = std::pow(u, alpha);
            Eigen::VectorXd c = c0;
            for (Eigen::Index m = 0; m < c.size(); ++m)
                c(m) *= pre * tab_gamma_(ua * model_.eigenvalues(m));
            out.col(j) = model_.eigenvectors * c;
        }
        out.col(0) = prob_.zeta0 * rgamma(gamma);
        return out;
    }

    /// Convolution of per-node data D (eigen coordinates, dim x (N+1)) with
    /// the singular kernel, at every grid point. D.col(0) non-finite flags a
    /// power-law first interval.
    Eigen::MatrixXd convolve_kernel_all(const Eigen::MatrixXd& dhat) const {
        const auto npts = static_cast<Eigen::Index>(grid_.points.size());
        const auto dim = model_.dim();
        const double alpha = prob_.ord.alpha;
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, npts);

        const bool first_singular = !dhat.col(0).allFinite();
        double fit_p = 0.0;
        if (first_singular) {
            double n1 = dhat.col(1).norm(), n2 = dhat.col(2).norm();
            fit_p = (n1 > 0.0 && n2 > 0.0)
                        ? std::clamp(std::log(n2 / n1) /
                                         std::log(grid_.points[2] / grid_.points[1]),
                                     -0.99, 8.0)
                        : 0.0;
        }

        detail::parallel_for(1, static_cast<std::size_t>(npts), [&](std::size_t ju) {
            const auto j = static_cast<Eigen::Index>(ju);
            std::vector<double> gm(static_cast<std::size_t>(dim));
            std::vector<double> hm(static_cast<std::size_t>(dim));
            std::vector<double> gm_prev(static_cast<std::size_t>(dim));
            std::vector<double> hm_prev(static_cast<std::size_t>(dim));
            const double u = grid_.points[static_cast<std::size_t>(j)];
            // walk intervals left to right; w decreases to 0 at i = j
            double w_prev = u - grid_.points[0];
            double wa_prev = std::pow(w_prev, alpha);
            for (Eigen::Index m = 0; m < dim; ++m) {
                double x = model_.eigenvalues(m) * wa_prev;
                gm_prev[static_cast<std::size_t>(m)] = wa_prev * tab_p1_(x);
                hm_prev[static_cast<std::size_t>(m)] = wa_prev * w_prev * tab_p2_(x);
            }
            Eigen::Index i0 = 0;
            if (first_singular) {
                // modeled interval [0, t1]: data ~ dhat.col(1) (s/t1)^{fit_p}
                out.col(j) += first_interval_conv(j, fit_p, dhat.col(1));
                i0 = 1;
                w_prev = u - grid_.points[1];
                wa_prev = std::pow(std::max(w_prev, 0.0), alpha);
                for (Eigen::Index m = 0; m < dim; ++m) {
                    double x = model_.eigenvalues(m) * wa_prev;
                    gm_prev[static_cast<std::size_t>(m)] = wa_prev * tab_p1_(x);
                    hm_prev[static_cast<std::size_t>(m)] =
                        wa_prev * w_prev * tab_p2_(x);
                }
            }
            for (Eigen::Index i = i0; i < j; ++i) {
                const double h =
                    grid_.points[static_cast<std::size_t>(i) + 1] - grid_.points[static_cast<std::size_t>(i)];
                const double w = u - grid_.points[static_cast<std::size_t>(i) + 1];
                const double wa = std::pow(std::max(w, 0.0), alpha);
                for (Eigen::Index m = 0; m < dim; ++m) {
                    double x = model_.eigenvalues(m) * wa;
                    gm[static_cast<std::size_t>(m)] = wa * tab_p1_(x);
                    hm[static_cast<std::size_t>(m)] = wa * w * tab_p2_(x);
                }
                for (Eigen::Index m = 0; m < dim; ++m) {
                    double f1 = dhat(m, i), f2 = dhat(m, i + 1);
                    double slope = (f2 - f1) / h;
                    double gp = gm_prev[static_cast<std::size_t>(m)];
                    double gc = gm[static_cast<std::size_t>(m)];
                    double hp = hm_prev[static_cast<std::size_t>(m)];
                    double hc = hm[static_cast<std::size_t>(m)];
                    out(m, j) += f1 * (gp - gc) + slope * (hp - hc - h * gc);
                }
                gm_prev.swap(gm);
                hm_prev.swap(hm);
            }
        });
        return out;
    }

    /// f convolution at every grid point (physical coordinates in and out).
    Eigen::MatrixXd f_convolution_all(const Eigen::MatrixXd& zeta) const {
        if (prob_.f_term.kind == TestNonlinearity::Kind::zero)
            return Eigen::MatrixXd::Zero(model_.dim(),
                                         static_cast<Eigen::Index>(grid_.points.size()));
        Eigen::MatrixXd fhat = nonlinearity_nodes(prob_.f_term, zeta);
        Eigen::MatrixXd conv = convolve_kernel_all(fhat);
        Eigen::MatrixXd out(model_.dim(), conv.cols());
        for (Eigen::Index j = 0; j < conv.cols(); ++j)
            out.col(j) = model_.eigenvectors * conv.col(j);
        out.col(0).setZero();
        return out;
    }

    /// Double convolution of the memory term at every grid point.
    Eigen::MatrixXd g_double_convolution_all(const Eigen::MatrixXd& zeta) const {
        const auto npts = static_cast<Eigen::Index>(grid_.points.size());
        if (prob_.g_term.kind == TestNonlinearity::Kind::zero)
            return Eigen::MatrixXd::Zero(model_.dim(), npts);
        Eigen::MatrixXd inner = memory_inner_all(zeta);  // physical coords
        Eigen::MatrixXd ihat(model_.dim(), npts);
        for (Eigen::Index j = 0; j < npts; ++j)
            ihat.col(j) = model_.eigenvectors.transpose() * inner.col(j);
        Eigen::MatrixXd conv = convolve_kernel_all(ihat);
        Eigen::MatrixXd out(model_.dim(), npts);
        for (Eigen::Index j = 0; j < npts; ++j)
            out.col(j) = model_.eigenvectors * conv.col(j);
        out.col(0).setZero();
        return out;
    }

    /// One full application of the map (column 0 keeps the weighted limit).
    Eigen::MatrixXd apply(const Eigen::MatrixXd& zeta) const {
        Eigen::MatrixXd out = homogeneous_all();
        if (prob_.f_term.kind != TestNonlinearity::Kind::zero)
            out += f_convolution_all(zeta);
        if (prob_.g_term.kind != TestNonlinearity::Kind::zero)
            out += g_double_convolution_all(zeta);
        out.col(0) = prob_.zeta0 * rgamma(prob_.ord.gamma);
        return out;
    }

    double ball_norm(const Eigen::MatrixXd& zeta) const {
        return weighted_norm(grid_, zeta, {prob_.f_term.cls.eps, prob_.g_term.cls.eps},
                             prob_.ord, model_);
    }

private:
    /// Per-node nonlinearity values transformed to eigen coordinates; the
    /// t=0 column is marked non-finite when f blows up there.
    Eigen::MatrixXd nonlinearity_nodes(const TestNonlinearity& f,
                                       const Eigen::MatrixXd& zeta) const {
        const auto npts = static_cast<Eigen::Index>(grid_.points.size());
        Eigen::MatrixXd vals(model_.dim(), npts);
        for (Eigen::Index j = 1; j < npts; ++j)
            vals.col(j) =
                f.eval(grid_.points[static_cast<std::size_t>(j)], zeta.col(j), model_);
        bool zero_ok = prob_.ord.gamma == 1.0 && f.t_exp >= 0.0;
        if (zero_ok)
            vals.col(0) = f.eval(0.0, zeta.col(0), model_);
        else
            vals.col(0).setConstant(std::numeric_limits<double>::quiet_NaN());
        Eigen::MatrixXd vhat(model_.dim(), npts);
        for (Eigen::Index j = 0; j < npts; ++j)
            vhat.col(j) = vals.col(j).allFinite()
                              ? (model_.eigenvectors.transpose() * vals.col(j)).eval()
                              : vals.col(j);
        return vhat;
    }

    /// Kernel convolution over the modeled first interval [0, t1] with data
    /// d1 (s/t1)^{fit_p} in eigen coordinates.
    Eigen::VectorXd first_interval_conv(Eigen::Index j, double fit_p,
                                        const Eigen::VectorXd& d1) const {
        const double u = grid_.points[static_cast<std::size_t>(j)];
        const double t1 = grid_.points[1];
        const double alpha = prob_.ord.alpha;
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(d1.size());
        auto kernel = [&](double w, Eigen::Index m) {
            double wa = std::pow(w, alpha);
            return std::pow(w, alpha - 1.0) * tab_kernel_(model_.eigenvalues(m) * wa);
        };
        if (j == 1) {
            // both endpoints singular: split at t1/2
            const double e = 1.0 + fit_p;
            double qmax = std::pow(0.5, e);  // (s/t1)^{e} at the midpoint
            for (Eigen::Index m = 0; m < d1.size(); ++m) {
                double left = detail::gauss_integrate(
                    [&](double q) {
                        double s = t1 * std::pow(q, 1.0 / e);
                        return kernel(u - s, m);
                    },
                    0.0, qmax, 24) * t1 / e;
                double right = detail::gauss_integrate(
                    [&](double q) {
                        // q = (u - s)^alpha
                        double w = std::pow(q, 1.0 / alpha);
                        double s = u - w;
                        return tab_kernel_(model_.eigenvalues(m) * q) *
                               std::pow(s / t1, fit_p);
                    },
                    0.0, std::pow(0.5 * t1, alpha), 24) / alpha;
                acc(m) = d1(m) * (left + right);
            }
            return acc;
        }
        const double e = 1.0 + fit_p;
        for (Eigen::Index m = 0; m < d1.size(); ++m) {
            double val = detail::gauss_integrate(
                [&](double q) {
                    double s = t1 * std::pow(q, 1.0 / e);
                    return kernel(u - s, m);
                },
                0.0, 1.0, 24) * t1 / e;
            acc(m) = d1(m) * val;
        }
        return acc;
    }

    /// Inner memory integral I_g(t_k) = int_0^{t_k} g(t_k - r, zeta(r)) dr at
    /// every node, in physical coordinates.
    Eigen::MatrixXd memory_inner_all(const Eigen::MatrixXd& zeta) const {
        const auto npts = static_cast<Eigen::Index>(grid_.points.size());
        const auto dim = model_.dim();
        const TestNonlinearity& g = prob_.g_term;
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, npts);
        const double p = g.t_exp;

        if (g.kind == TestNonlinearity::Kind::forced) {
            for (Eigen::Index k = 1; k < npts; ++k) {
                double tk = grid_.points[static_cast<std::size_t>(k)];
                out.col(k) = g.c0 * std::pow(tk, p + 1.0) / (p + 1.0) * g.direction;
            }
            return out;
        }

        // state-dependent kernel: product-integrate (t_k - r)^p against the
        // interpolant of X(r) = state_part(zeta(r))
        Eigen::MatrixXd X(dim, npts);
        for (Eigen::Index j = 1; j < npts; ++j)
            X.col(j) = g.state_part(zeta.col(j), model_);
        bool x0_ok = zeta.col(0).allFinite() && prob_.ord.gamma == 1.0;
        if (x0_ok)
            X.col(0) = g.state_part(zeta.col(0), model_);
        else
            X.col(0).setConstant(std::numeric_limits<double>::quiet_NaN());

        bool first_singular = !X.col(0).allFinite();
        double fit_p = 0.0;
        if (first_singular) {
            double n1 = X.col(1).norm(), n2 = X.col(2).norm();
            fit_p = (n1 > 0.0 && n2 > 0.0)
                        ? std::clamp(std::log(n2 / n1) /
                                         std::log(grid_.points[2] / grid_.points[1]),
                                     -0.99, 8.0)
                        : 0.0;
        }
        const double a = p + 1.0;  // moment order for the weight (t_k - r)^p
        detail::parallel_for(1, static_cast<std::size_t>(npts), [&](std::size_t ku) {
            const auto k = static_cast<Eigen::Index>(ku);
            const double tk = grid_.points[static_cast<std::size_t>(k)];
            Eigen::Index i0 = 0;
            if (first_singular) {
                // modeled first interval with X ~ X1 (r/t1)^{fit_p}
                const double t1 = grid_.points[1];
                const double e = 1.0 + fit_p;
                double val;
                if (k == 1) {
                    val = std::pow(t1, p + fit_p + 1.0) / std::pow(t1, fit_p) *
                          beta_fn(p + 1.0, fit_p + 1.0);
                } else {
                    val = detail::gauss_integrate(
                              [&](double q) {
                                  double r = t1 * std::pow(q, 1.0 / e);
                                  return std::pow(tk - r, p);
                              },
                              0.0, 1.0, 24) * t1 / e;
                }
                out.col(k) += X.col(1) * val;
                i0 = 1;
            }
            for (Eigen::Index i = i0; i < k; ++i) {
                double r1 = grid_.points[static_cast<std::size_t>(i)];
                double r2 = grid_.points[static_cast<std::size_t>(i) + 1];
                double w1 = tk - r1, w2 = std::max(0.0, tk - r2);
                double h = r2 - r1;
                double m0 = detail::moment0(a, w1, w2);
                double m1 = detail::moment0(a + 1.0, w1, w2);
                for (Eigen::Index m = 0; m < dim; ++m) {
                    double f1 = X(m, i), f2 = X(m, i + 1);
                    double slope = (f2 - f1) / h;
                    out(m, k) += (f1 + slope * w1) * m0 - slope * m1;
                }
            }
            out.col(k) *= g.c0;
        });
        return out;
    }

    MildProblem prob_;
    TimeGrid grid_;
    const SectorialModel& model_;
    MlTable tab_gamma_, tab_kernel_, tab_p1_, tab_p2_;
};

/// f convolution at a single grid point (test surface; the solver uses the
/// batched map).
inline Eigen::VectorXd f_convolution(const MildProblem& prob, const TimeGrid& grid,
                                     const Eigen::MatrixXd& zeta, std::size_t j) {
    LambdaMap lm(prob, grid);
    return lm.f_convolution_all(zeta).col(static_cast<Eigen::Index>(j));
}

inline Eigen::VectorXd g_double_convolution(const MildProblem& prob, const TimeGrid& grid,
                                            const Eigen::MatrixXd& zeta, std::size_t j) {
    LambdaMap lm(prob, grid);
    return lm.g_double_convolution_all(zeta).col(static_cast<Eigen::Index>(j));
}

inline Eigen::MatrixXd apply_lambda(const MildProblem& prob, const TimeGrid& grid,
                                    const Eigen::MatrixXd& zeta) {
    LambdaMap lm(prob, grid);
    return lm.apply(zeta);
}

/// Picard iteration from the homogeneous term; contraction ratios recorded.
inline MildSolution picard_solve(const MildProblem& prob, const TimeGrid& grid,
                                 double tol = 1e-10, int max_iter = 200) {
    prob.validate();
    LambdaMap lm(prob, grid);
    MildSolution sol;
    sol.grid = grid;
    sol.eps_list = {prob.f_term.cls.eps, prob.g_term.cls.eps};

    Eigen::MatrixXd zeta = lm.homogeneous_all();
    double prev_residual = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        if (lm.ball_norm(zeta) > prob.mu_ball * (1.0 + 1e-9)) sol.ball_warning = true;
        Eigen::MatrixXd next = lm.apply(zeta);
        double residual = weighted_norm(grid, next - zeta, sol.eps_list, prob.ord,
                                        *prob.model);
        IterationRecord rec;
        rec.iter = it;
        rec.residual = residual;
        rec.ratio = (it > 1 && prev_residual > 0.0) ? residual / prev_residual : 0.0;
        sol.trace.push_back(rec);
        zeta.swap(next);
        double scale = std::max(1.0, weighted_norm(grid, zeta, sol.eps_list, prob.ord,
                                                   *prob.model));
        if (residual <= tol * scale) {
            sol.converged = true;
            break;
        }
        prev_residual = residual;
    }
    if (!sol.converged) {
        double last_ratio = sol.trace.empty() ? 0.0 : sol.trace.back().ratio;
        throw NonConvergence(max_iter, last_ratio,
                             "picard_solve: no contraction after " +
                                 std::to_string(max_iter) +
                                 " sweeps (last ratio " + std::to_string(last_ratio) +
                                 "); shrink tau0 and rerun");
    }
    sol.values = zeta;
    for (double eps : sol.eps_list)
        sol.weighted_norms.push_back(
            weighted_norm(grid, zeta, {eps}, prob.ord, *prob.model));
    return sol;
}

/// The beta_t -> {0,1} limit problems (gamma recomputed; the initial datum
/// is read through I^{1-gamma}, which the limits turn into I^{1-alpha} and
/// the identity respectively).
enum class LimitKind { riemann_liouville, caputo };

inline MildProblem limit_variant(const MildProblem& prob, LimitKind which) {
    MildProblem out = prob;
    out.ord = FracOrder(prob.ord.alpha, which == LimitKind::caputo ? 1.0 : 0.0);
    return out;
}

}  // namespace hilfer
