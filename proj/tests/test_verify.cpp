#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hilfer/verify.hpp"

using namespace hilfer;
using Catch::Approx;

namespace {

MildProblem builtin(double alpha, double beta_t) { return make_builtin_problem(alpha, beta_t, 6); }

}  // namespace

TEST_CASE("lemma2: zero map, builtin margins, rl-limit display", "[verify]") {
    auto grid = TimeGrid::make(1.0, 192, 3.0);
    // f = 0: LHS vanishes and every margin equals the RHS
    {
        auto p = builtin(0.5, 0.5);
        p.f_term = make_zero_nonlinearity(p.f_term.cls);
        Eigen::MatrixXd zeta = make_ball_trajectory(grid, p, 0.5, 3);
        auto rep = lemma2_check(p, grid, zeta, 0.05);
        CHECK(rep.passed);
        for (const auto& s : rep.samples) {
            CHECK(s.lhs == 0.0);
            CHECK(s.margin == Approx(s.rhs));
        }
    }
    // power builtin at theta in {0, eps/2, eps}; beta_t = 0 gives the
    // gamma = alpha special display through the same code path
    for (double bt : {0.0, 0.5}) {
        auto p = builtin(0.5, bt);
        p.zeta0.setZero();  // forced response stays in the contraction ball
        auto sol = picard_solve(p, grid);
        for (double th : {0.0, 0.05, 0.1}) {
            auto rep = lemma2_check(p, grid, sol.values, th);
            CHECK(rep.passed);
            CHECK(rep.worst_margin >= 0.0);
        }
    }
    auto p = builtin(0.5, 0.5);
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(6, 193);
    CHECK_THROWS_AS(lemma2_check(p, grid, z, 0.9), DomainError);
}

TEST_CASE("lemma3: identical pair, ball pairs, ball violation", "[verify]") {
    auto p = builtin(0.7, 1.0);
    auto grid = TimeGrid::make(1.0, 192, 3.0);
    double mu = 0.5;
    Eigen::MatrixXd a = make_ball_trajectory(grid, p, mu, 10);
    auto rep0 = lemma3_check(p, grid, a, a, 0.05, mu);
    CHECK(rep0.passed);
    for (const auto& s : rep0.samples) CHECK(s.lhs == 0.0);

    for (std::uint64_t s = 0; s < 4; ++s) {
        Eigen::MatrixXd x = make_ball_trajectory(grid, p, mu, 20 + 2 * s);
        Eigen::MatrixXd y = make_ball_trajectory(grid, p, mu, 21 + 2 * s);
        auto rep = lemma3_check(p, grid, x, y, 0.05, mu);
        CHECK(rep.passed);
    }
    Eigen::MatrixXd big = 10.0 * make_ball_trajectory(grid, p, mu, 50);
    CHECK_THROWS_AS(lemma3_check(p, grid, big, a, 0.05, mu), BallViolation);
}

TEST_CASE("lemma4 and lemma5: memory term margins", "[verify]") {
    auto grid = TimeGrid::make(1.0, 192, 3.0);
    for (double alpha : {0.5, 0.8}) {
        auto p = builtin(alpha, 0.5);
        p.zeta0.setZero();
        auto sol = picard_solve(p, grid);
        double eps2 = p.g_term.cls.eps;
        for (double th : {0.0, 0.5 * eps2, eps2}) {
            auto rep = lemma4_check(p, grid, sol.values, th);
            CHECK(rep.passed);
        }
        double mu = 0.5;
        Eigen::MatrixXd a = make_ball_trajectory(grid, p, mu, 31);
        Eigen::MatrixXd b = make_ball_trajectory(grid, p, mu, 32);
        auto rep5 = lemma5_check(p, grid, a, b, 0.5 * eps2, mu);
        CHECK(rep5.passed);
        // zero difference
        auto rep5z = lemma5_check(p, grid, a, a, 0.0, mu);
        for (const auto& s : rep5z.samples) CHECK(s.lhs == 0.0);
    }
    // perturbation scaling: LHS is first-order in the perturbation and the
    // ratio to its size stays below Gamma^2
    auto p = builtin(0.6, 0.5);
    // state-dependent memory term so the difference is nontrivial
    auto gcls = p.f_term.cls;
    gcls.delta = 0.05;
    gcls.V = {0.05, 0.2, 1.0};
    p.g_term = make_linear_nonlinearity(*p.model, gcls, 5e-3);
    double mu = 0.5;
    Eigen::MatrixXd base = make_ball_trajectory(grid, p, 0.8 * mu, 41);
    Eigen::MatrixXd dir = make_ball_trajectory(grid, p, 0.1 * mu, 42);
    double prev_scale = -1.0;
    for (double h : {1e-2, 1e-3}) {
        Eigen::MatrixXd pert = base + h * dir;
        auto rep = lemma5_check(p, grid, pert, base, 0.0, mu);
        CHECK(rep.passed);
        double lhs_max = 0.0;
        for (const auto& s : rep.samples) lhs_max = std::max(lhs_max, s.lhs);
        double scale = lhs_max / h;
        if (prev_scale > 0.0) CHECK(scale == Approx(prev_scale).epsilon(0.05));
        prev_scale = scale;
    }
}

TEST_CASE("contraction: smallness passes and ratios stay below 1/2", "[verify]") {
    auto p = builtin(0.5, 1.0);
    auto grid = TimeGrid::make(1.0, 160, 2.0);
    auto rep = contraction_check(p, grid, 1.0, 6, 1234);
    CHECK(rep.smallness.ok);
    CHECK(rep.max_ratio < 0.5);
    CHECK(rep.passed);
    CHECK(rep.ratios.size() == 6);
}

TEST_CASE("continuous dependence: zero perturbation, linearity, bound", "[verify]") {
    auto grid = TimeGrid::make(1.0, 160, 2.0);
    auto p = builtin(0.5, 1.0);
    // w0 = zeta0 gives an identically zero LHS
    auto rep0 = continuous_dependence_check(p, grid, p.zeta0, {0.0, 0.05});
    for (const auto& s : rep0.samples) CHECK(s.lhs <= 1e-12);

    // linear problem: ratio constancy across perturbation sizes
    MildProblem lin = p;
    lin.f_term = make_zero_nonlinearity(p.f_term.cls);
    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(6);
    e1(0) = 1.0;
    std::vector<double> ratios;
    auto sol_base = picard_solve(lin, grid);
    for (double d : {1e-2, 1e-4}) {
        MildProblem pp = lin;
        pp.zeta0 = lin.zeta0 + d * e1;
        auto sol_p = picard_solve(pp, grid);
        double num = (sol_p.values.col(80) - sol_base.values.col(80)).norm();
        ratios.push_back(num / d);
    }
    CHECK(ratios[0] == Approx(ratios[1]).epsilon(1e-6));

    // perturbed data: weighted differences below C(theta0, tau0)
    Eigen::VectorXd w0 = p.zeta0;
    w0(1) += 0.05;
    auto rep = continuous_dependence_check(p, grid, w0, {0.0, 0.05, 0.1});
    CHECK(rep.passed);
}

TEST_CASE("uniqueness: refinement agreement and gronwall structure", "[verify]") {
    auto p = make_builtin_problem(0.6, 1.0, 4);
    auto rep = uniqueness_check(p, 1.0, 0.75, {128, 256});
    CHECK(rep.passed);
    REQUIRE(rep.disagreement.size() == 2);
    CHECK(rep.disagreement[0] <= 5e-3);
    CHECK(rep.disagreement[1] < rep.disagreement[0]);
    CHECK(rep.gronwall_structure.passed);
    CHECK_THROWS_AS(uniqueness_check(p, 1.5, 1.0, {64}), DomainError);
}

TEST_CASE("smoothing: theorem and remark displays", "[verify]") {
    auto model = build_dirichlet_laplacian(8, M_PI, 1.0);
    std::vector<double> ugrid;
    for (int i = 0; i <= 24; ++i) ugrid.push_back(std::pow(10.0, -4.0 + 5.0 * i / 24.0));
    auto rep = smoothing_check(model, 0.5, {0.0, 0.5, 1.0}, ugrid, 25);
    CHECK(rep.passed);
    CHECK(rep.worst_margin >= -1e-9);
}

TEST_CASE("report bookkeeping", "[verify]") {
    EstimateReport rep;
    rep.name = "demo";
    rep.add(0.5, 1.0, 2.0);
    CHECK(rep.passed);
    CHECK(rep.worst_margin == Approx(1.0));
    rep.add(0.6, 3.0, 2.0);  // violation beyond tolerance
    CHECK(!rep.passed);
    CHECK(rep.worst_margin == Approx(-1.0));
    CHECK(rep.min_margin_over_rhs() == Approx(-0.5));
}
