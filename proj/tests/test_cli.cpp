#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hilfer/cli_app.hpp"

using namespace hilfer;
using Catch::Approx;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    REQUIRE(is.good());
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

RunConfig config_from_string(const std::string& text) {
    std::istringstream is(text);
    return RunConfig::from_ini(parse_ini(is));
}

const char* kSmallRun = R"(# small verification run
[problem]
alpha = 0.5
beta_t = 1.0
model = laplacian
model_n = 4
zeta0 = e1
zeta0_scale = 0.2
f_kind = power
f_c0 = 1e-3
g_kind = forced
g_c0 = 1e-3
g_texp = -0.2   # v + q1s + vmod_p
[grid]
tau0 = 1.0
N = 96
r_grade = 2.0
[solver]
tol = 1e-10
max_iter = 100
[verify]
checks = lemma2 contraction gronwall
seed = 7
pairs = 4
samples = 10
[output]
dir = out
)";

}  // namespace

TEST_CASE("ini parsing and validation", "[cli]") {
    // value errors are caught before any numerics
    CHECK_THROWS_AS(config_from_string("[problem]\nalpha = 2.5\n"), ConfigError);
    CHECK_THROWS_AS(config_from_string("[problem]\nalpha = abc\n"), ConfigError);
    CHECK_THROWS_AS(config_from_string("[problem]\nunknown_key = 1\n"), ConfigError);
    CHECK_THROWS_AS(config_from_string("[nosuchsection]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(config_from_string("[grid]\nN = 1\n"), ConfigError);
    CHECK_THROWS_AS(config_from_string("[verify]\nchecks = bogus\n"), ConfigError);
    CHECK_THROWS_AS(config_from_string("[problem]\nmodel = file\n"), ConfigError);
    // class violations surface before solving
    CHECK_THROWS_AS(config_from_string("[problem]\nf_gamma_eps = 0.1\n"), ClassViolation);

    RunConfig ok = config_from_string(kSmallRun);
    CHECK(ok.alpha == Approx(0.5));
    CHECK(ok.grid_n == 96);
    CHECK(ok.checks.size() == 3);
    auto prob = ok.build_problem();
    CHECK(prob.model->dim() == 4);
    CHECK(prob.f_term.kind == TestNonlinearity::Kind::power);
}

TEST_CASE("solve run writes artifacts and converges", "[cli]") {
    RunConfig cfg = config_from_string(kSmallRun);
    std::string dir = "/tmp/hilfer_cli_solve";
    std::filesystem::remove_all(dir);
    CHECK(cli::run_solve(cfg, dir) == cli::kExitOk);
    CHECK(std::filesystem::exists(dir + "/solution.csv"));
    CHECK(std::filesystem::exists(dir + "/trace.csv"));
    std::string summary = slurp(dir + "/summary.txt");
    CHECK(summary.find("converged 1") != std::string::npos);
    std::string sol = slurp(dir + "/solution.csv");
    CHECK(sol.rfind("t,mode_0", 0) == 0);
    std::filesystem::remove_all(dir);
}

TEST_CASE("verify run is deterministic byte-for-byte", "[cli]") {
    RunConfig cfg = config_from_string(kSmallRun);
    std::string d1 = "/tmp/hilfer_cli_v1", d2 = "/tmp/hilfer_cli_v2";
    std::filesystem::remove_all(d1);
    std::filesystem::remove_all(d2);
    CHECK(cli::run_verify(cfg, d1) == cli::kExitOk);
    CHECK(cli::run_verify(cfg, d2) == cli::kExitOk);
    for (const auto& entry : std::filesystem::directory_iterator(d1)) {
        std::string name = entry.path().filename().string();
        CAPTURE(name);
        CHECK(slurp(d1 + "/" + name) == slurp(d2 + "/" + name));
    }
    std::string summary = slurp(d1 + "/summary.txt");
    CHECK(summary.find("contraction pass") != std::string::npos);
    CHECK(summary.find("gronwall_equality pass") != std::string::npos);
    std::filesystem::remove_all(d1);
    std::filesystem::remove_all(d2);
}

TEST_CASE("mlf table output", "[cli]") {
    std::ostringstream os;
    CHECK(cli::run_mlf(1.0, 1.0, {0.0, -1.0}, os) == cli::kExitOk);
    std::istringstream is(os.str());
    double z, v;
    is >> z >> v;
    CHECK(z == 0.0);
    CHECK(v == Approx(1.0));
    is >> z >> v;
    CHECK(v == Approx(std::exp(-1.0)).epsilon(1e-12));

    std::ostringstream os2;
    CHECK(cli::run_mlf(0.5, 1.0, {-1.0}, os2) == cli::kExitOk);
    std::istringstream is2(os2.str());
    is2 >> z >> v;
    CHECK(v == Approx(0.4275835761558070).epsilon(1e-10));
}

TEST_CASE("model export round trip", "[cli]") {
    RunConfig cfg = config_from_string(kSmallRun);
    std::string dir = "/tmp/hilfer_cli_export";
    std::filesystem::remove_all(dir);
    CHECK(cli::run_model_export(cfg, dir) == cli::kExitOk);
    Eigen::MatrixXd m = load_matrix_txt(dir + "/model.txt");
    CHECK((m - build_dirichlet_laplacian(4, M_PI, 1.0).matrix).norm() == 0.0);
    std::filesystem::remove_all(dir);
}
