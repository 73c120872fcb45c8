#pragma once

// Batch entry points behind the command-line tool: solve runs, verification
// suites, scalar Mittag-Leffler tables, model export. Factored out of main()
// so the test suite can drive them in-process.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "hilfer/config.hpp"
#include "hilfer/csv.hpp"
#include "hilfer/detail/parallel.hpp"
#include "hilfer/gronwall.hpp"
#include "hilfer/mild_solver.hpp"
#include "hilfer/verify.hpp"

namespace hilfer::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNoConvergence = 2;
inline constexpr int kExitUsage = 64;

inline void report_error(const Error& e) {
    std::cerr << "ERROR:" << e.kind() << ":" << e.what() << "\n";
}

inline void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir);
}

/// Solve run: solution CSV (t, per-mode eigen coordinates, per-eps weighted
/// norms), iteration trace CSV, plain-text summary, optional refinement
/// table. Exit 0 on convergence, 2 on NonConvergence.
inline int run_solve(const RunConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    MildProblem prob = cfg.build_problem();
    TimeGrid grid = cfg.build_grid();

    MildSolution sol;
    try {
        sol = picard_solve(prob, grid, cfg.tol, cfg.max_iter);
    } catch (const NonConvergence& e) {
        report_error(e);
        return kExitNoConvergence;
    }

    const auto dim = prob.model->dim();
    {
        CsvWriter csv(out_dir + "/solution.csv");
        std::vector<std::string> cols{"t"};
        for (Eigen::Index m = 0; m < dim; ++m) cols.push_back("mode_" + std::to_string(m));
        for (std::size_t i = 0; i < sol.eps_list.size(); ++i)
            cols.push_back("wnorm_eps" + std::to_string(i));
        csv.header(cols);
        for (std::size_t j = 0; j < grid.points.size(); ++j) {
            std::vector<double> row{grid.points[j]};
            Eigen::VectorXd coeff =
                prob.model->eigenvectors.transpose() * sol.values.col(static_cast<Eigen::Index>(j));
            for (Eigen::Index m = 0; m < dim; ++m) row.push_back(coeff(m));
            for (double eps : sol.eps_list) {
                double w = (j == 0) ? 0.0
                                    : std::pow(grid.points[j], eps * prob.ord.gamma) *
                                          theta_norm(sol.values.col(static_cast<Eigen::Index>(j)),
                                                     1.0 + eps, *prob.model);
                row.push_back(w);
            }
            csv.row(row);
        }
    }
    {
        CsvWriter csv(out_dir + "/trace.csv");
        csv.header({"iter", "ratio", "residual"});
        for (const auto& r : sol.trace)
            csv.row({static_cast<double>(r.iter), r.ratio, r.residual});
    }
    if (cfg.refine_levels > 0) {
        CsvWriter csv(out_dir + "/refinement.csv");
        csv.header({"N", "overlap_disagreement"});
        int n = cfg.grid_n;
        MildSolution prev = sol;
        for (int lvl = 0; lvl < cfg.refine_levels; ++lvl) {
            int n2 = 2 * n;
            MildSolution fine =
                picard_solve(prob, TimeGrid::make(cfg.tau0, n2, grid.r_grade), cfg.tol,
                             cfg.max_iter);
            double worst = 0.0;
            for (int j = 1; j <= n; ++j) {
                double num = (prev.values.col(j) - fine.values.col(2 * j)).norm();
                double den = fine.values.col(2 * j).norm();
                if (den > 1e-12) worst = std::max(worst, num / den);
            }
            csv.row({static_cast<double>(n), worst});
            prev = fine;
            n = n2;
        }
    }
    {
        std::ofstream os(out_dir + "/summary.txt", std::ios::binary);
        os << "converged 1\n";
        os << "iterations " << sol.trace.size() << "\n";
        os << "ball_warning " << (sol.ball_warning ? 1 : 0) << "\n";
        for (std::size_t i = 0; i < sol.eps_list.size(); ++i)
            os << "weighted_norm_eps" << i << " " << sol.weighted_norms[i] << "\n";
    }
    return kExitOk;
}

namespace detail_cli {

inline void write_report(const std::string& path, const EstimateReport& rep) {
    CsvWriter csv(path);
    csv.header({"name", "u", "lhs", "rhs", "margin"});
    std::ofstream dummy;
    for (const auto& s : rep.samples) {
        // name column followed by the numeric columns
        csv.row_named(rep.name, {s.u, s.lhs, s.rhs, s.margin});
    }
}

inline bool wants(const std::vector<std::string>& checks, const std::string& name) {
    for (const auto& c : checks)
        if (c == "all" || c == name) return true;
    return false;
}

}  // namespace detail_cli

/// Verification run: selected checks against the configured problem; one CSV
/// per check plus a pass/fail summary. Exit 0 iff everything passed.
inline int run_verify(const RunConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    MildProblem prob = cfg.build_problem();
    TimeGrid grid = cfg.build_grid();

    std::vector<double> thetas = cfg.theta_list;
    auto default_thetas = [&](double eps) {
        return std::vector<double>{0.0, 0.5 * eps, eps};
    };

    struct Line {
        std::string name;
        bool passed;
        double worst;
    };
    std::vector<Line> lines;
    auto note = [&](const EstimateReport& rep) {
        detail_cli::write_report(out_dir + "/" + rep.name + ".csv", rep);
        lines.push_back({rep.name, rep.passed, rep.worst_margin});
    };

    const bool needs_solution =
        detail_cli::wants(cfg.checks, "lemma2") || detail_cli::wants(cfg.checks, "lemma4");
    MildSolution sol;
    if (needs_solution) {
        try {
            sol = picard_solve(prob, grid, cfg.tol, cfg.max_iter);
        } catch (const NonConvergence& e) {
            report_error(e);
            return kExitNoConvergence;
        }
    }

    if (detail_cli::wants(cfg.checks, "lemma2")) {
        auto ths = thetas.empty() ? default_thetas(prob.f_term.cls.eps) : thetas;
        for (double th : ths) {
            auto rep = lemma2_check(prob, grid, sol.values, th);
            rep.name = "lemma2_theta" + std::to_string(th);
            note(rep);
        }
    }
    if (detail_cli::wants(cfg.checks, "lemma4")) {
        auto ths = thetas.empty() ? default_thetas(prob.g_term.cls.eps) : thetas;
        for (double th : ths) {
            auto rep = lemma4_check(prob, grid, sol.values, th);
            rep.name = "lemma4_theta" + std::to_string(th);
            note(rep);
        }
    }
    if (detail_cli::wants(cfg.checks, "lemma3") || detail_cli::wants(cfg.checks, "lemma5")) {
        for (int p = 0; p < std::max(1, cfg.pairs / 4); ++p) {
            Eigen::MatrixXd a =
                make_ball_trajectory(grid, prob, cfg.mu, cfg.seed + 2 * static_cast<std::uint64_t>(p));
            Eigen::MatrixXd b = make_ball_trajectory(grid, prob, cfg.mu,
                                                     cfg.seed + 2 * static_cast<std::uint64_t>(p) + 1);
            if (detail_cli::wants(cfg.checks, "lemma3")) {
                auto ths = thetas.empty() ? default_thetas(prob.f_term.cls.eps) : thetas;
                for (double th : ths) {
                    auto rep = lemma3_check(prob, grid, a, b, th, cfg.mu);
                    rep.name = "lemma3_pair" + std::to_string(p) + "_theta" + std::to_string(th);
                    note(rep);
                }
            }
            if (detail_cli::wants(cfg.checks, "lemma5")) {
                auto ths = thetas.empty() ? default_thetas(prob.g_term.cls.eps) : thetas;
                for (double th : ths) {
                    auto rep = lemma5_check(prob, grid, a, b, th, cfg.mu);
                    rep.name = "lemma5_pair" + std::to_string(p) + "_theta" + std::to_string(th);
                    note(rep);
                }
            }
        }
    }
    if (detail_cli::wants(cfg.checks, "contraction")) {
        auto rep = contraction_check(prob, grid, cfg.mu, cfg.pairs, cfg.seed);
        CsvWriter csv(out_dir + "/contraction.csv");
        csv.header({"pair", "ratio"});
        for (std::size_t i = 0; i < rep.ratios.size(); ++i)
            csv.row({static_cast<double>(i), rep.ratios[i]});
        lines.push_back({"contraction", rep.passed, 0.5 - rep.max_ratio});
    }
    if (detail_cli::wants(cfg.checks, "smoothing")) {
        std::vector<double> ugrid;
        for (int i = 0; i <= 24; ++i) ugrid.push_back(std::pow(10.0, -4.0 + 5.0 * i / 24.0));
        auto rep = smoothing_check(*prob.model, cfg.alpha, {0.0, 0.5, 1.0}, ugrid,
                                   cfg.samples, cfg.seed);
        note(rep);
    }
    if (detail_cli::wants(cfg.checks, "dependence")) {
        Eigen::VectorXd w0 = prob.zeta0;
        w0(0) += 0.05;
        auto ths = thetas.empty() ? default_thetas(prob.f_term.cls.eps) : thetas;
        try {
            auto rep = continuous_dependence_check(prob, grid, w0, ths, cfg.tol, cfg.max_iter);
            note(rep);
        } catch (const NonConvergence& e) {
            report_error(e);
            return kExitNoConvergence;
        }
    }
    if (detail_cli::wants(cfg.checks, "uniqueness")) {
        auto rep = uniqueness_check(prob, cfg.tau0, 0.75 * cfg.tau0,
                                    {cfg.grid_n / 4, cfg.grid_n / 2}, cfg.tol);
        CsvWriter csv(out_dir + "/uniqueness.csv");
        csv.header({"N", "overlap_disagreement"});
        for (std::size_t i = 0; i < rep.levels.size(); ++i)
            csv.row({static_cast<double>(rep.levels[i]), rep.disagreement[i]});
        detail_cli::write_report(out_dir + "/uniqueness_gronwall.csv", rep.gronwall_structure);
        lines.push_back({"uniqueness", rep.passed,
                         rep.disagreement.empty() ? 0.0 : 5e-3 - rep.disagreement.back()});
    }
    if (detail_cli::wants(cfg.checks, "gronwall")) {
        // equality-case instance at the configured alpha
        const int n = 256;
        GronwallInstance inst;
        inst.alpha = cfg.alpha;
        Sampled zeta;
        for (int j = 0; j <= n; ++j) {
            double t = std::pow(static_cast<double>(j) / n, 2.0);
            inst.v.t.push_back(t);
            inst.v.y.push_back(1.0);
            inst.g.t.push_back(t);
            inst.g.y.push_back(1.0);
            zeta.t.push_back(t);
            zeta.y.push_back(
                ml_positive(cfg.alpha, 1.0, std::tgamma(cfg.alpha) * std::pow(t, cfg.alpha)));
        }
        auto grep = gronwall_verify(inst, zeta, 250, 1e-3);
        EstimateReport rep;
        rep.name = "gronwall_equality";
        for (std::size_t j = 0; j < grep.u.size(); ++j)
            rep.add(grep.u[j], zeta.y[j + 1], zeta.y[j + 1] + grep.margin_series[j]);
        rep.passed = rep.passed && grep.hypothesis_ok;
        note(rep);
    }

    bool all_ok = true;
    {
        std::ofstream os(out_dir + "/summary.txt", std::ios::binary);
        char buf[40];
        for (const auto& l : lines) {
            std::snprintf(buf, sizeof buf, "%.17g", l.worst);
            os << l.name << " " << (l.passed ? "pass" : "fail") << " worst_margin " << buf
               << "\n";
            all_ok = all_ok && l.passed;
        }
    }
    return all_ok ? kExitOk : kExitConfig;
}

/// Scalar Mittag-Leffler table printed to stdout.
inline int run_mlf(double alpha, double beta_p, const std::vector<double>& zs,
                   std::ostream& os = std::cout) {
    MlfParams p{alpha, beta_p, 1e-13, 5.0, 400};
    p.validate();
    char buf[40];
    for (double z : zs) {
        double val = (z <= 0.0) ? ml_global(p, z) : ml_positive(alpha, beta_p, z);
        std::snprintf(buf, sizeof buf, "%.17g", val);
        os << z << "\t" << buf << "\n";
    }
    return kExitOk;
}

inline int run_model_export(const RunConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    auto model = cfg.build_model();
    save_matrix_txt(out_dir + "/model.txt", model->matrix);
    return kExitOk;
}

}  // namespace hilfer::cli
