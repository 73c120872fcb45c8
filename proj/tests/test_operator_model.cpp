#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <unsupported/Eigen/MatrixFunctions>

#include "hilfer/operator_model.hpp"
#include "oracles.hpp"

using namespace hilfer;
using Catch::Approx;

TEST_CASE("dirichlet laplacian eigenvalues", "[operator_model]") {
    auto m1 = build_dirichlet_laplacian(1, M_PI, 1.0);
    CHECK(m1.eigenvalues(0) == Approx(8.0 / (M_PI * M_PI)).epsilon(1e-13));

    // closed-form eigenpairs against a dense symmetric eigensolver
    auto m3 = build_dirichlet_laplacian(3, M_PI, 1.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m3.matrix);
    for (int k = 0; k < 3; ++k)
        CHECK(m3.eigenvalues(k) == Approx(es.eigenvalues()(k)).epsilon(1e-12));
    CHECK((m3.eigenvectors * m3.eigenvalues.asDiagonal() * m3.eigenvectors.transpose() -
           m3.matrix)
              .norm() < 1e-10 * m3.matrix.norm());

    // continuum limit: smallest eigenvalue -> k^2 = 1
    auto m127 = build_dirichlet_laplacian(127, M_PI, 1.0);
    double h = M_PI / 128.0;
    CHECK(std::fabs(m127.eigenvalues(0) - 1.0) < 3.0 * h * h);

    CHECK_THROWS_AS(build_dirichlet_laplacian(0, 1.0, 1.0), DomainError);
}

TEST_CASE("theta norm: identity, eigen scaling, interpolation", "[operator_model]") {
    auto d = SectorialModel::diagonal({1.0, 4.0});
    Eigen::VectorXd x(2);
    x << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    CHECK(theta_norm(x, 0.0, d) == Approx(x.norm()).epsilon(1e-14));
    Eigen::VectorXd e2(2);
    e2 << 0.0, 1.0;
    CHECK(theta_norm(e2, 1.0, d) == Approx(4.0).epsilon(1e-14));
    CHECK(theta_norm(x, 0.5, d) == Approx(std::sqrt(2.5)).epsilon(1e-12));
    // dense matrix square root oracle
    Eigen::MatrixXd sq = d.matrix.sqrt();
    CHECK(theta_norm(x, 0.5, d) == Approx((sq * x).norm()).epsilon(1e-12));

    Eigen::VectorXd bad(3);
    bad.setOnes();
    CHECK_THROWS_AS(theta_norm(bad, 0.5, d), DimensionError);

    // log-convexity: ||A^t x|| <= ||x||^{1-t} ||A x||^t
    auto lap = build_dirichlet_laplacian(12, M_PI, 1.0);
    HaltonSampler hs(7, 12);
    for (int s = 0; s < 100; ++s) {
        auto pt = hs.next();
        Eigen::VectorXd v(12);
        for (int i = 0; i < 12; ++i) v(i) = 2.0 * pt[static_cast<std::size_t>(i)] - 1.0;
        double n0 = v.norm(), n1 = (lap.matrix * v).norm();
        for (double th : {0.25, 0.5, 0.75})
            CHECK(theta_norm(v, th, lap) <=
                  std::pow(n0, 1.0 - th) * std::pow(n1, th) * (1.0 + 1e-12));
    }
}

TEST_CASE("ml_operator: semigroup case, t=0, scalar oracle", "[operator_model]") {
    auto lap = build_dirichlet_laplacian(6, M_PI, 1.0);
    Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(6, 0.3, 1.8);
    // alpha = 1 is the matrix exponential
    Eigen::MatrixXd expm = (-0.7 * lap.matrix).exp();
    CHECK((ml_operator(1.0, 1.0, 0.0, 0.7, lap, x) - expm * x).norm() < 1e-11 * x.norm());
    // t = 0 returns x for second parameter 1
    CHECK((ml_operator(0.6, 1.0, 0.0, 0.0, lap, x) - x).norm() == 0.0);
    CHECK_THROWS_AS(ml_operator(0.6, 1.0, -0.4, 0.0, lap, x), SingularityError);
    // scalar case against mlf_core
    auto one = SectorialModel::diagonal({1.0});
    Eigen::VectorXd xs(1);
    xs << 1.0;
    MlfParams p{0.5, 0.5, 1e-13, 5.0, 400};
    CHECK(ml_operator(0.5, 0.5, 0.0, 1.0, one, xs)(0) ==
          Approx(ml_global(p, -1.0)).epsilon(1e-12));
}

TEST_CASE("hankel contour agrees with spectral route", "[operator_model]") {
    auto one = SectorialModel::diagonal({1.0});
    Eigen::VectorXd xs(1);
    xs << 1.0;
    MlfParams p05{0.5, 1.0, 1e-13, 5.0, 400};
    CHECK(hankel_contour_operator(0.5, 1.0, one, xs, ContourFamily::first)(0) ==
          Approx(ml_global(p05, -1.0)).margin(1e-8));

    auto lap = build_dirichlet_laplacian(3, M_PI, 1.0);
    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(3);
    e1(0) = 1.0;
    Eigen::VectorXd spec = ml_operator(0.9, 0.9, 0.0, 0.2, lap, e1);
    Eigen::VectorXd cont = hankel_contour_operator(0.9, 0.2, lap, e1, ContourFamily::second);
    CHECK((spec - cont).norm() < 1e-8 * spec.norm());

    for (double a : {0.3, 0.6, 0.9}) {
        for (double u : {0.01, 0.1, 1.0, 10.0}) {
            Eigen::VectorXd s1 = ml_operator(a, 1.0, 0.0, u, lap, e1);
            Eigen::VectorXd c1 = hankel_contour_operator(a, u, lap, e1, ContourFamily::first);
            CHECK((s1 - c1).norm() <= 1e-8 * s1.norm());
        }
    }
    CHECK_THROWS_AS(hankel_contour_operator(1.0, 1.0, one, xs, ContourFamily::first),
                    DomainError);
}

TEST_CASE("uniform boundedness and strong continuity", "[operator_model]") {
    auto lap = build_dirichlet_laplacian(10, M_PI, 1.0);
    for (double a : {0.4, 0.7, 1.0}) {
        MlfParams p{a, 1.0, 1e-13, 5.0, 400};
        for (double u : {0.0, 1e-3, 0.1, 1.0, 10.0, 100.0}) {
            double opnorm = 0.0;
            for (Eigen::Index i = 0; i < lap.eigenvalues.size(); ++i)
                opnorm = std::max(
                    opnorm, std::fabs(ml_global(p, -std::pow(u, a) * lap.eigenvalues(i))));
            CHECK(opnorm <= 1.0 + 1e-13);
        }
    }
    Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(10, -1.0, 1.0);
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 40; ++k) {
        double u = std::pow(2.0, -k);
        double dev = (ml_operator(0.6, 1.0, 0.0, u, lap, x) - x).norm();
        CHECK(dev < prev);
        prev = dev;
    }
    CHECK(prev < 1e-2 * x.norm());
}

TEST_CASE("theta constant estimates", "[operator_model]") {
    auto lap = build_dirichlet_laplacian(8, M_PI, 1.0);
    std::vector<double> ugrid;
    for (int i = 0; i <= 40; ++i) ugrid.push_back(std::pow(10.0, -4.0 + 5.0 * i / 40.0));
    CHECK(estimate_theta_constant(lap, 0.7, 0.0, ugrid) == Approx(1.0));
    CHECK(estimate_theta_constant(lap, 1.0, 1.0, ugrid) ==
          Approx(1.0 / std::exp(1.0)).epsilon(1e-8));
    double got = estimate_theta_constant(lap, 0.5, 0.5, ugrid);
    MlfParams p{0.5, 1.0, 1e-13, 5.0, 400};
    double xmax = std::pow(10.0, 0.5) * lap.eigenvalues(7);
    CHECK(got == Approx(ml_weighted(p, 0.5, xmax)).epsilon(1e-9));

    // smoothing bound with the refined constant dominates random draws
    double theta_hat = got;
    HaltonSampler hs(11, 8);
    for (int s = 0; s < 100; ++s) {
        auto pt = hs.next();
        Eigen::VectorXd v(8);
        for (int i = 0; i < 8; ++i) v(i) = 2.0 * pt[static_cast<std::size_t>(i)] - 1.0;
        for (double u : {1e-4, 1e-2, 0.5, 10.0}) {
            double lhs = std::pow(u, 0.5 * 0.5) *
                         theta_norm(ml_operator(0.5, 1.0, 0.0, u, lap, v), 0.5, lap);
            CHECK(lhs <= theta_hat * v.norm() * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("matrix text io round trip", "[operator_model]") {
    auto lap = build_dirichlet_laplacian(5, 2.0, 3.0);
    std::string path = "/tmp/hilfer_test_matrix.txt";
    save_matrix_txt(path, lap.matrix);
    Eigen::MatrixXd back = load_matrix_txt(path);
    CHECK((back - lap.matrix).norm() == 0.0);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_matrix_txt("/tmp/definitely_missing_hilfer.txt"), ConfigError);
}

TEST_CASE("model validation", "[operator_model]") {
    Eigen::MatrixXd neg(2, 2);
    neg << -1.0, 0.0, 0.0, 2.0;
    CHECK_THROWS_AS(SectorialModel::from_matrix(neg), DomainError);
    Eigen::MatrixXd nonsym(2, 2);
    nonsym << 2.0, 1.0, 0.0, 3.0;
    auto m = SectorialModel::from_matrix(nonsym);
    CHECK(!m.symmetric);
    CHECK_THROWS_AS(m.require_spectral(), DomainError);
    // contour route still works on the nonsymmetric model
    Eigen::VectorXd x(2);
    x << 1.0, 1.0;
    Eigen::VectorXd v = hankel_contour_operator(0.5, 0.5, m, x, ContourFamily::first);
    // upper-triangular: second component decouples, compare with scalar value
    MlfParams p{0.5, 1.0, 1e-13, 5.0, 400};
    CHECK(v(1) == Approx(ml_global(p, -std::pow(0.5, 0.5) * 3.0)).margin(1e-8));
}
