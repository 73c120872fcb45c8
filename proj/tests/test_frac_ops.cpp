#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hilfer/frac_ops.hpp"
#include "hilfer/mlf.hpp"
#include "oracles.hpp"

using namespace hilfer;
using Catch::Approx;

namespace {

Sampled sample_uniform(const std::function<double(double)>& f, double a, double b, int n) {
    Sampled s;
    for (int j = 0; j <= n; ++j) {
        double t = a + (b - a) * j / n;
        s.t.push_back(t);
        s.y.push_back(f(t));
    }
    return s;
}

Sampled sample_graded(const std::function<double(double)>& f, double b, int n, double r) {
    Sampled s;
    for (int j = 0; j <= n; ++j) {
        double t = b * std::pow(static_cast<double>(j) / n, r);
        s.t.push_back(t);
        s.y.push_back(f(t));
    }
    return s;
}

}  // namespace

TEST_CASE("frac integral: constant, power rule, plain integral", "[frac_ops]") {
    PsiFunction id = PsiFunction::identity();
    // I^a[1](u) = u^a / Gamma(a+1)
    auto ones = sample_uniform([](double) { return 1.0; }, 0.0, 1.0, 512);
    for (double a : {0.4, 0.6, 0.9}) {
        double u = 0.8;
        CHECK(psi_frac_integral(a, id, ones, u) ==
              Approx(std::pow(u, a) / std::tgamma(a + 1.0)).epsilon(1e-10));
    }
    // alpha = 1: ordinary integral of s^2
    auto sq = sample_uniform([](double s) { return s * s; }, 0.0, 1.0, 4096);
    CHECK(psi_frac_integral(1.0, id, sq, 1.0) == Approx(1.0 / 3.0).epsilon(1e-6));
    // power rule at alpha=0.5, mu=1.5, with an adaptive quadrature oracle
    auto p15 = sample_uniform([](double s) { return std::pow(s, 1.5); }, 0.0, 1.0, 4096);
    double got = psi_frac_integral(0.5, id, p15, 1.0);
    CHECK(got == Approx(std::tgamma(2.5) / std::tgamma(3.0)).epsilon(1e-6));
    double oracle = oracles::quad(
        [&](double s) { return std::pow(1.0 - s, -0.5) * std::pow(s, 1.5); }, 0.0, 1.0) /
        std::tgamma(0.5);
    CHECK(got == Approx(oracle).epsilon(1e-6));
}

TEST_CASE("frac integral: power rule grid", "[frac_ops]") {
    PsiFunction id = PsiFunction::identity();
    for (double a : {0.3, 0.5, 0.8}) {
        for (double mu : {0.5, 1.0, 2.0}) {
            auto f = sample_uniform([&](double s) { return std::pow(s, mu); }, 0.0, 1.0, 4096);
            double want = oracles::rl_integral_power(a, mu, 1.0);
            CHECK(psi_frac_integral(a, id, f, 1.0) == Approx(want).epsilon(1e-6));
        }
    }
}

TEST_CASE("frac integral: semigroup property", "[frac_ops]") {
    PsiFunction id = PsiFunction::identity();
    const int n = 4096;
    auto f = sample_uniform([](double s) { return s * s; }, 0.0, 1.0, n);
    Sampled g;
    g.t = f.t;
    g.y.resize(f.y.size());
    g.y[0] = 0.0;
    for (std::size_t i = 1; i < f.t.size(); ++i)
        g.y[i] = psi_frac_integral(0.4, id, f, f.t[i]);
    double lhs = psi_frac_integral(0.3, id, g, 1.0);
    double rhs = psi_frac_integral(0.7, id, f, 1.0);
    CHECK(lhs == Approx(rhs).epsilon(1e-5));
}

TEST_CASE("frac integral: psi covariance under change of variables", "[frac_ops]") {
    // I^{a;psi} g (u) = I^{a;id} [g o psi^{-1}] (psi(u)) with psi(u)=u^2, g=s^4
    PsiFunction sqp = PsiFunction::square();
    PsiFunction id = PsiFunction::identity();
    auto g = sample_uniform([](double s) { return std::pow(s, 4.0); }, 0.0, 1.0, 2048);
    auto h = sample_uniform([](double y) { return y * y; }, 0.0, 1.0, 2048);
    double u = 0.9;
    double lhs = psi_frac_integral(0.6, sqp, g, u);
    double rhs = psi_frac_integral(0.6, id, h, u * u);
    CHECK(lhs == Approx(rhs).epsilon(1e-6));
}

TEST_CASE("frac integral: refinement order at least 1.5", "[frac_ops]") {
    PsiFunction id = PsiFunction::identity();
    double want = oracles::rl_integral_power(0.5, 2.0, 1.0);
    std::vector<double> errs;
    for (int n : {256, 512, 1024, 2048}) {
        auto f = sample_uniform([](double s) { return s * s; }, 0.0, 1.0, n);
        errs.push_back(std::fabs(psi_frac_integral(0.5, id, f, 1.0) - want));
    }
    for (std::size_t i = 1; i < errs.size(); ++i) {
        double order = std::log2(errs[i - 1] / errs[i]);
        CHECK(order >= 1.5);
    }
}

TEST_CASE("frac integral: mesh and domain errors", "[frac_ops]") {
    PsiFunction id = PsiFunction::identity();
    auto f = sample_uniform([](double s) { return s; }, 0.0, 1.0, 16);
    CHECK_THROWS_AS(psi_frac_integral(0.5, id, f, 1.5), MeshError);
    CHECK_THROWS_AS(psi_frac_integral(1.5, id, f, 0.5), DomainError);
    CHECK_THROWS_AS(psi_frac_integral(0.0, id, f, 0.5), DomainError);
    // psi with unbounded derivative at the endpoint is rejected up front
    PsiFunction bad{[](double u) { return std::sqrt(u); },
                    [](double u) { return 0.5 / std::sqrt(u); },
                    "sqrt"};
    CHECK_THROWS_AS(bad.validate(0.0, 1.0), DomainError);
    CHECK_NOTHROW(PsiFunction::log1p().validate(0.0, 2.0));
}

TEST_CASE("hilfer derivative: vanishing on u^{gamma-1}", "[frac_ops]") {
    FracOrder ord(0.5, 0.5);  // gamma = 0.75
    PsiFunction id = PsiFunction::identity();
    auto f = sample_graded([&](double u) { return std::pow(u, ord.gamma - 1.0); }, 1.0, 2048, 3.0);
    REQUIRE(!std::isfinite(f.y[0]));
    for (double u : {0.1, 0.35, 0.7, 1.0}) {
        double d = hilfer_derivative(ord, id, f, u);
        CHECK(std::fabs(d) < 1e-6);
    }
}

TEST_CASE("hilfer derivative: classical and Caputo power rules", "[frac_ops]") {
    PsiFunction id = PsiFunction::identity();
    auto fsq = sample_uniform([](double u) { return u * u; }, 0.0, 1.0, 1024);
    for (double bt : {0.0, 0.5, 1.0}) {
        FracOrder ord(1.0, bt);
        CHECK(hilfer_derivative(ord, id, fsq, 1.0) == Approx(2.0).epsilon(1e-9));
    }
    auto flin = sample_uniform([](double u) { return u; }, 0.0, 1.0, 1024);
    FracOrder cap(0.5, 1.0);
    CHECK(hilfer_derivative(cap, id, flin, 1.0) ==
          Approx(1.1283791670955126).epsilon(1e-8));
}

TEST_CASE("hilfer derivative: beta limits match Caputo L1 and RL references", "[frac_ops]") {
    PsiFunction id = PsiFunction::identity();
    // f = u^2 + 1 separates RL from Caputo: RL has the extra u^{-a}/Gamma(1-a)
    auto f = sample_uniform([](double u) { return u * u + 1.0; }, 0.0, 1.0, 2048);
    for (double a : {0.4, 0.7}) {
        FracOrder cap(a, 1.0), rl(a, 0.0);
        for (double u : {0.5, 1.0}) {
            double caputo_ref =
                oracles::caputo_l1(a, [](double s) { return s * s + 1.0; }, u, 4000);
            CHECK(hilfer_derivative(cap, id, f, u) == Approx(caputo_ref).epsilon(1e-4));
            double rl_ref = 2.0 / std::tgamma(3.0 - a) * std::pow(u, 2.0 - a) +
                            std::pow(u, -a) / std::tgamma(1.0 - a);
            CHECK(hilfer_derivative(rl, id, f, u) == Approx(rl_ref).epsilon(1e-4));
        }
    }
}

TEST_CASE("initial functional: identity, power, propagator normalization", "[frac_ops]") {
    // gamma = 1: plain limit of f
    auto f1 = sample_graded([](double u) { return 2.0 + u; }, 1.0, 64, 2.0);
    CHECK(rl_initial_functional(1.0, f1, 0.5) == Approx(2.0).epsilon(1e-6));
    // I^{1-gamma} u^{gamma-1} = Gamma(gamma) exactly
    double g = 0.75;
    auto f2 = sample_graded([&](double u) { return std::pow(u, g - 1.0); }, 1.0, 1024, 3.0);
    CHECK(rl_initial_functional(g, f2, 0.1) == Approx(std::tgamma(g)).epsilon(1e-4));
    // Hilfer propagator normalization: I^{1-gamma}[u^{gamma-1} E_{a,gamma}(-u^a)] -> 1
    MlfParams p{0.5, g, 1e-13, 5.0, 400};
    auto f3 = sample_graded(
        [&](double u) {
            return u <= 0.0 ? std::numeric_limits<double>::infinity()
                            : std::pow(u, g - 1.0) * ml_global(p, -std::pow(u, 0.5));
        },
        1.0, 1024, 3.0);
    CHECK(rl_initial_functional(g, f3, 0.1) == Approx(1.0).epsilon(1e-2));
    CHECK_THROWS_AS(rl_initial_functional(g, f2, 1e-9), MeshError);
}
