#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hilfer/mlf.hpp"
#include "oracles.hpp"

using namespace hilfer;
using Catch::Approx;

namespace {
MlfParams params(double a, double b, double tol = 1e-13, int cap = 400, double radius = 5.0) {
    return MlfParams{a, b, tol, radius, cap};
}
}  // namespace

TEST_CASE("series: classical anchors", "[mlf]") {
    CHECK(ml_series(params(1, 1), 1.0) == Approx(std::exp(1.0)).epsilon(0).margin(1e-12));
    CHECK(ml_series(params(0.7, 1.3), 0.0) == Approx(1.0 / std::tgamma(1.3)).epsilon(1e-15));
    double v = ml_series(params(0.5, 1), -1.0);
    CHECK(v == Approx(0.4275835761558070).epsilon(0).margin(1e-10));
    CHECK(v == Approx(std::exp(1.0) * std::erfc(1.0)).epsilon(1e-12));
    CHECK(v == Approx(oracles::mlf_bigseries(0.5, 1.0, -1.0)).epsilon(1e-13));
}

TEST_CASE("series: parameter validation and divergence cap", "[mlf]") {
    CHECK_THROWS_AS(ml_series(params(-0.5, 1), 0.1), DomainError);
    CHECK_THROWS_AS(ml_series(params(0.5, 0), 0.1), DomainError);
    CHECK_THROWS_AS(ml_series(params(0.5, 1, 0.5), 0.1), DomainError);  // tol >= 1e-2
    CHECK_THROWS_AS(ml_series(params(0.5, 1), -6.0), DomainError);      // outside radius
    // alpha=0.3 at z=-5 needs ~2300 terms: the default 400-term cap must throw
    CHECK_THROWS_AS(ml_series(params(0.3, 1), -5.0), DivergenceError);
    // with a raised cap the same evaluation must agree with the big-series oracle
    double v = ml_series(params(0.3, 1, 1e-13, 4000), -5.0);
    CHECK(v == Approx(oracles::mlf_bigseries(0.3, 1.0, -5.0)).epsilon(1e-11));
}

TEST_CASE("global: exponential special cases", "[mlf]") {
    CHECK(ml_global(params(1, 1), -20.0) == Approx(std::exp(-20.0)).epsilon(1e-13));
    CHECK(ml_global(params(1, 2), -3.0) == Approx((1.0 - std::exp(-3.0)) / 3.0).epsilon(1e-13));
    for (double x = 0.0; x >= -50.0; x -= 0.7)
        CHECK(ml_global(params(1, 1), x) == Approx(std::exp(x)).epsilon(1e-12));
}

TEST_CASE("global: oracle checks across evaluation regimes", "[mlf]") {
    // series region
    CHECK(ml_global(params(0.5, 0.5), -3.0) ==
          Approx(oracles::mlf_bigseries(0.5, 0.5, -3.0)).epsilon(1e-12));
    // moderate |x|: asymptotics or cut integral depending on decay
    CHECK(ml_global(params(0.5, 0.5), -10.0) ==
          Approx(oracles::mlf_bigseries(0.5, 0.5, -10.0)).epsilon(1e-11));
    CHECK(ml_global(params(0.9, 1.0), -8.0) ==
          Approx(oracles::mlf_bigseries(0.9, 1.0, -8.0)).epsilon(1e-11));
    CHECK(ml_global(params(0.9, 0.9), -12.0) ==
          Approx(oracles::mlf_bigseries(0.9, 0.9, -12.0)).epsilon(1e-11));
    CHECK(ml_global(params(0.7, 1.7), -20.0) ==
          Approx(oracles::mlf_bigseries(0.7, 1.7, -20.0)).epsilon(1e-11));
    CHECK(ml_global(params(0.3, 1.0), -9.0) ==
          Approx(oracles::mlf_bigseries(0.3, 1.0, -9.0)).epsilon(1e-11));
    // alpha = 1 with non-integer beta exercises the Kummer branch
    CHECK(ml_global(params(1.0, 1.5), -12.0) ==
          Approx(oracles::mlf_bigseries(1.0, 1.5, -12.0)).epsilon(1e-11));
    CHECK(ml_global(params(1.0, 0.5), -8.0) ==
          Approx(oracles::mlf_bigseries(1.0, 0.5, -8.0)).epsilon(1e-11));
    // large |x|: cross-check against an independently coded expansion
    for (double a : {0.4, 0.6, 0.85}) {
        double x = 2e5;
        double got = ml_global(params(a, 1.0), -x);
        CHECK(got == Approx(oracles::mlf_asymptotic3(a, 1.0, x)).epsilon(1e-9));
    }
    CHECK_NOTHROW(ml_global(params(0.5, 1.0), -1e6));
    CHECK_THROWS_AS(ml_global(params(0.5, 1.0), 0.5), DomainError);
    CHECK_THROWS_AS(ml_global(params(1.2, 1.0), -1.0), DomainError);
}

TEST_CASE("series/global agreement on the shared region", "[mlf]") {
    const double tol = 1e-13;
    for (double a : {0.3, 0.5, 0.7, 0.9}) {
        for (double b : {a, 1.0, 2.0 * a + 1.0}) {
            MlfParams ps = params(a, b, tol, 4000);
            for (int i = 0; i <= 20; ++i) {
                double z = -5.0 * i / 20.0;
                double s = ml_series(ps, z);
                double g = ml_global(ps, z);
                CHECK(std::fabs(s - g) <= 10.0 * tol * std::fabs(g) + 1e-15);
            }
        }
    }
}

TEST_CASE("E_alpha(-x) is decreasing and in (0,1]", "[mlf]") {
    for (double a : {0.3, 0.5, 0.9, 1.0}) {
        MlfParams ps = params(a, 1.0);
        double prev = ml_global(ps, 0.0);
        CHECK(prev == 1.0);
        int npts = (a == 0.5) ? 10000 : 800;
        for (int i = 1; i <= npts; ++i) {
            double x = 50.0 * i / npts;
            double v = ml_global(ps, -x);
            CHECK(v > 0.0);
            CHECK(v < prev);
            prev = v;
        }
    }
}

TEST_CASE("recurrence E_{a,b}(z) = z E_{a,b+a}(z) + 1/Gamma(b)", "[mlf]") {
    for (double a : {0.4, 0.65, 0.9}) {
        for (double b : {0.8, 1.0, 1.7}) {
            for (double z : {-0.5, -3.0, -8.0, -40.0}) {
                double lhs = ml_global(params(a, b), z);
                double rhs = z * ml_global(params(a, b + a), z) + rgamma(b);
                CHECK(lhs == Approx(rhs).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("weighted sup scan", "[mlf]") {
    CHECK(ml_weighted(params(0.5, 1), 0.0, 100.0) == Approx(1.0).epsilon(1e-12));
    CHECK(ml_weighted(params(1, 1), 1.0, 50.0) == Approx(1.0 / std::exp(1.0)).margin(1e-8));
    // dense-scan oracle per the contract
    MlfParams ps = params(0.6, 0.6);
    double dense = 0.0;
    const int n = 1000000;
    for (int i = 1; i <= n; ++i) {
        double x = 100.0 * i / n;
        double v = std::pow(x, 0.8) * std::fabs(ml_global(ps, -x));
        dense = std::max(dense, v);
    }
    double got = ml_weighted(ps, 0.8, 100.0);
    CHECK(got >= dense * (1.0 - 1e-9));
    CHECK(got == Approx(dense).epsilon(1e-6));
    CHECK_THROWS_AS(ml_weighted(ps, -0.1, 10.0), DomainError);
}

TEST_CASE("positive-argument series for the Gronwall bounds", "[mlf]") {
    CHECK(ml_positive(1.0, 1.0, 3.0) == Approx(std::exp(3.0)).epsilon(1e-13));
    CHECK(ml_positive(0.5, 1.0, 2.0) ==
          Approx(oracles::mlf_bigseries(0.5, 1.0, 2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(ml_positive(0.5, 1.0, -1.0), DomainError);
}

TEST_CASE("chebyshev table matches direct evaluation", "[mlf]") {
    for (double b_off : {0.0, 1.0, 2.0}) {
        double a = 0.6;
        MlTable tab(a, a + b_off, 2000.0);
        MlfParams ps = params(a, a + b_off);
        for (int i = 0; i <= 400; ++i) {
            double x = 2000.0 * std::pow(static_cast<double>(i) / 400.0, 3.0);
            double want = ml_global(ps, -x);
            CHECK(tab(x) == Approx(want).epsilon(1e-9).margin(1e-13));
        }
    }
}
