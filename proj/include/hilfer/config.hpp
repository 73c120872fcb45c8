#pragma once

// Flat, sectioned key = value run configuration. Every key is validated
// before any numerical work; unknown keys are rejected so typos cannot
// silently fall back to defaults.

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hilfer/errors.hpp"
#include "hilfer/mild_solver.hpp"
#include "hilfer/nonlinearity.hpp"
#include "hilfer/operator_model.hpp"

namespace hilfer {

struct IniData {
    std::map<std::string, std::map<std::string, std::string>> sections;

    bool has(const std::string& sec, const std::string& key) const {
        auto s = sections.find(sec);
        return s != sections.end() && s->second.count(key) > 0;
    }
    std::string get(const std::string& sec, const std::string& key,
                    const std::string& dflt) const {
        auto s = sections.find(sec);
        if (s == sections.end()) return dflt;
        auto k = s->second.find(key);
        return k == s->second.end() ? dflt : k->second;
    }
};

inline IniData parse_ini(std::istream& is) {
    IniData out;
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto strip = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        line = strip(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": malformed section header");
            section = strip(line.substr(1, line.size() - 2));
            out.sections[section];
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = strip(line.substr(0, eq));
        std::string val = strip(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        out.sections[section][key] = val;
    }
    return out;
}

inline IniData parse_ini_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path);
    return parse_ini(is);
}

namespace detail {

inline double to_double(const std::string& sec, const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("[" + sec + "] " + key + ": not a number: '" + v + "'");
    }
}

inline int to_int(const std::string& sec, const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        int i = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw ConfigError("[" + sec + "] " + key + ": not an integer: '" + v + "'");
    }
}

inline std::vector<double> to_doubles(const std::string& sec, const std::string& key,
                                      const std::string& v) {
    std::istringstream is(v);
    std::vector<double> out;
    std::string tok;
    while (is >> tok) out.push_back(to_double(sec, key, tok));
    return out;
}

inline std::vector<std::string> to_tokens(const std::string& v) {
    std::istringstream is(v);
    std::vector<std::string> out;
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

}  // namespace detail

/// One nonlinearity block ([problem] f_* or g_*).
struct NonlinearityConfig {
    std::string kind = "zero";  // zero | power | forced | linear
    double c0 = 0.0;
    double t_exp = 0.0;
    std::string direction = "ones";  // ones | e1 | values
    std::vector<double> direction_values;
    EpsRegularClass cls;
};

struct RunConfig {
    // [problem]
    double alpha = 0.5;
    double beta_t = 1.0;
    std::string model_kind = "laplacian";  // laplacian | diag | file
    int model_n = 8;
    double model_length = M_PI;
    double model_scale = 1.0;
    std::vector<double> model_diag;
    std::string model_file;
    std::string zeta0_kind = "e1";  // zeros | ones | e1 | values
    std::vector<double> zeta0_values;
    double zeta0_scale = 1.0;
    double mu = 1.0;
    NonlinearityConfig f, g;
    // [grid]
    double tau0 = 1.0;
    int grid_n = 1024;
    double r_grade = 0.0;  // 0 -> max(2, 2/alpha)
    int refine_levels = 0;
    // [solver]
    double tol = 1e-10;
    int max_iter = 200;
    // [verify]
    std::vector<std::string> checks = {"all"};
    std::vector<double> theta_list;
    std::uint64_t seed = 42;
    int samples = 100;
    int pairs = 20;
    // [output]
    std::string out_dir = "out";

    static RunConfig from_ini(const IniData& ini);

    std::shared_ptr<SectorialModel> build_model() const {
        if (model_kind == "laplacian")
            return std::make_shared<SectorialModel>(
                build_dirichlet_laplacian(model_n, model_length, model_scale));
        if (model_kind == "diag") {
            if (model_diag.empty()) throw ConfigError("[problem] model_diag: empty");
            return std::make_shared<SectorialModel>(SectorialModel::diagonal(model_diag));
        }
        if (model_kind == "file")
            return std::make_shared<SectorialModel>(
                SectorialModel::from_matrix(load_matrix_txt(model_file)));
        throw ConfigError("[problem] model: unknown kind '" + model_kind + "'");
    }

    Eigen::VectorXd build_vector(const std::string& kind, const std::vector<double>& values,
                                 Eigen::Index dim, const std::string& what) const {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
        if (kind == "zeros") return v;
        if (kind == "ones") return Eigen::VectorXd::Ones(dim);
        if (kind == "e1") {
            v(0) = 1.0;
            return v;
        }
        if (kind == "values") {
            if (static_cast<Eigen::Index>(values.size()) != dim)
                throw ConfigError(what + ": expected " + std::to_string(dim) + " values");
            for (Eigen::Index i = 0; i < dim; ++i) v(i) = values[static_cast<std::size_t>(i)];
            return v;
        }
        throw ConfigError(what + ": unknown vector kind '" + kind + "'");
    }

    TestNonlinearity build_nonlinearity(const NonlinearityConfig& nc,
                                        const SectorialModel& model) const {
        if (nc.kind == "zero") return make_zero_nonlinearity(nc.cls);
        if (nc.kind == "power")
            return make_power_nonlinearity(model, nc.cls, nc.c0, tau0, 2.0, seed);
        if (nc.kind == "forced") {
            Eigen::VectorXd e = build_vector(nc.direction, nc.direction_values, model.dim(),
                                             "nonlinearity direction");
            return make_forced_nonlinearity(model, nc.cls, nc.c0, nc.t_exp, e, tau0, seed);
        }
        if (nc.kind == "linear")
            return make_linear_nonlinearity(model, nc.cls, nc.c0, tau0, 2.0, seed);
        throw ConfigError("nonlinearity kind: '" + nc.kind + "'");
    }

    MildProblem build_problem() const {
        MildProblem p;
        p.ord = FracOrder(alpha, beta_t);
        p.model = build_model();
        p.zeta0 =
            zeta0_scale * build_vector(zeta0_kind, zeta0_values, p.model->dim(), "zeta0");
        p.mu_ball = mu;
        p.f_term = build_nonlinearity(f, *p.model);
        p.g_term = build_nonlinearity(g, *p.model);
        p.validate();
        return p;
    }

    TimeGrid build_grid() const {
        double r = r_grade > 0.0 ? r_grade : TimeGrid::default_grade(alpha);
        return TimeGrid::make(tau0, grid_n, r);
    }
};

inline RunConfig RunConfig::from_ini(const IniData& ini) {
    static const std::map<std::string, std::set<std::string>> known = {
        {"problem",
         {"alpha",       "beta_t",        "model",        "model_n",     "model_length",
          "model_scale", "model_diag",    "model_file",   "zeta0",       "zeta0_values",
          "zeta0_scale", "mu",
          "f_kind",      "f_c0",          "f_texp",       "f_direction", "f_direction_values",
          "f_eps",       "f_rho",         "f_gamma_eps",  "f_q1",        "f_q1s",
          "f_v",         "f_delta",       "f_vmod_p",     "f_vmod_uref",
          "g_kind",      "g_c0",          "g_texp",       "g_direction", "g_direction_values",
          "g_eps",       "g_rho",         "g_gamma_eps",  "g_q1",        "g_q1s",
          "g_v",         "g_delta",       "g_vmod_p",     "g_vmod_uref"}},
        {"grid", {"tau0", "N", "r_grade", "refine_levels"}},
        {"solver", {"tol", "max_iter"}},
        {"verify", {"checks", "theta", "seed", "samples", "pairs"}},
        {"output", {"dir"}},
    };
    for (const auto& [sec, keys] : ini.sections) {
        auto it = known.find(sec);
        if (it == known.end()) throw ConfigError("unknown config section [" + sec + "]");
        for (const auto& [k, v] : keys)
            if (!it->second.count(k))
                throw ConfigError("unknown key '" + k + "' in section [" + sec + "]");
    }

    RunConfig c;
    auto num = [&](const char* sec, const char* key, double dflt) {
        std::string v = ini.get(sec, key, "");
        return v.empty() ? dflt : detail::to_double(sec, key, v);
    };
    auto integer = [&](const char* sec, const char* key, int dflt) {
        std::string v = ini.get(sec, key, "");
        return v.empty() ? dflt : detail::to_int(sec, key, v);
    };

    c.alpha = num("problem", "alpha", c.alpha);
    c.beta_t = num("problem", "beta_t", c.beta_t);
    if (!(c.alpha > 0.0 && c.alpha <= 1.0))
        throw ConfigError("[problem] alpha: must be in (0, 1]");
    if (!(c.beta_t >= 0.0 && c.beta_t <= 1.0))
        throw ConfigError("[problem] beta_t: must be in [0, 1]");
    c.model_kind = ini.get("problem", "model", c.model_kind);
    c.model_n = integer("problem", "model_n", c.model_n);
    c.model_length = num("problem", "model_length", c.model_length);
    c.model_scale = num("problem", "model_scale", c.model_scale);
    if (ini.has("problem", "model_diag"))
        c.model_diag = detail::to_doubles("problem", "model_diag",
                                          ini.get("problem", "model_diag", ""));
    c.model_file = ini.get("problem", "model_file", "");
    if (c.model_kind == "file" && c.model_file.empty())
        throw ConfigError("[problem] model_file: required for model = file");
    if (c.model_kind == "file") {
        std::ifstream probe(c.model_file);
        if (!probe) throw ConfigError("[problem] model_file: cannot open " + c.model_file);
    }
    c.zeta0_kind = ini.get("problem", "zeta0", c.zeta0_kind);
    if (ini.has("problem", "zeta0_values"))
        c.zeta0_values = detail::to_doubles("problem", "zeta0_values",
                                            ini.get("problem", "zeta0_values", ""));
    c.zeta0_scale = num("problem", "zeta0_scale", c.zeta0_scale);
    c.mu = num("problem", "mu", c.mu);

    auto load_nl = [&](const char* prefix, NonlinearityConfig& nc, double dflt_gamma) {
        std::string p(prefix);
        nc.kind = ini.get("problem", p + "_kind", nc.kind);
        nc.c0 = num("problem", (p + "_c0").c_str(), nc.c0);
        nc.t_exp = num("problem", (p + "_texp").c_str(), nc.t_exp);
        nc.direction = ini.get("problem", p + "_direction", nc.direction);
        if (ini.has("problem", p + "_direction_values"))
            nc.direction_values = detail::to_doubles(
                "problem", p + "_direction_values",
                ini.get("problem", p + "_direction_values", ""));
        nc.cls.eps = num("problem", (p + "_eps").c_str(), nc.cls.eps);
        nc.cls.rho = num("problem", (p + "_rho").c_str(), nc.cls.rho);
        nc.cls.gamma_eps = num("problem", (p + "_gamma_eps").c_str(), dflt_gamma);
        nc.cls.q1 = num("problem", (p + "_q1").c_str(), nc.cls.q1);
        nc.cls.q1s = num("problem", (p + "_q1s").c_str(), nc.cls.q1s);
        nc.cls.v = num("problem", (p + "_v").c_str(), nc.cls.v);
        nc.cls.delta = num("problem", (p + "_delta").c_str(), nc.cls.delta);
        nc.cls.V.delta = nc.cls.delta;
        nc.cls.V.p = num("problem", (p + "_vmod_p").c_str(), nc.cls.V.p);
        nc.cls.V.u_ref = num("problem", (p + "_vmod_uref").c_str(), nc.cls.V.u_ref);
        nc.cls.validate();
    };
    // defaults mirror the built-in verification classes
    c.f.cls.eps = 0.1;
    c.f.cls.rho = 2.0;
    c.f.cls.q1 = -0.1;
    c.f.cls.q1s = -0.2;
    c.f.cls.delta = 0.01;
    c.f.cls.V = {0.01, 0.2, 1.0};
    load_nl("f", c.f, 0.8);
    c.g.cls.eps = 0.05;
    c.g.cls.rho = 2.0;
    c.g.cls.q1 = -0.2;
    c.g.cls.q1s = -0.2;
    c.g.cls.v = -0.1;
    c.g.cls.delta = 0.5;
    c.g.cls.V = {0.5, 0.1, 1.0};
    load_nl("g", c.g, 0.9);

    c.tau0 = num("grid", "tau0", c.tau0);
    c.grid_n = integer("grid", "N", c.grid_n);
    c.r_grade = num("grid", "r_grade", c.r_grade);
    c.refine_levels = integer("grid", "refine_levels", c.refine_levels);
    if (!(c.tau0 > 0.0)) throw ConfigError("[grid] tau0: must be positive");
    if (c.grid_n < 2) throw ConfigError("[grid] N: must be >= 2");
    if (c.refine_levels < 0 || c.refine_levels > 6)
        throw ConfigError("[grid] refine_levels: must be in [0, 6]");

    c.tol = num("solver", "tol", c.tol);
    c.max_iter = integer("solver", "max_iter", c.max_iter);
    if (!(c.tol > 0.0 && c.tol < 1.0)) throw ConfigError("[solver] tol: must be in (0, 1)");
    if (c.max_iter < 1) throw ConfigError("[solver] max_iter: must be >= 1");

    if (ini.has("verify", "checks")) c.checks = detail::to_tokens(ini.get("verify", "checks", ""));
    static const std::set<std::string> known_checks = {
        "all",    "lemma2",    "lemma3",     "lemma4",    "lemma5",
        "contraction", "smoothing", "dependence", "uniqueness", "gronwall"};
    for (const auto& ch : c.checks)
        if (!known_checks.count(ch)) throw ConfigError("[verify] checks: unknown check '" + ch + "'");
    if (ini.has("verify", "theta"))
        c.theta_list = detail::to_doubles("verify", "theta", ini.get("verify", "theta", ""));
    c.seed = static_cast<std::uint64_t>(integer("verify", "seed", static_cast<int>(c.seed)));
    c.samples = integer("verify", "samples", c.samples);
    c.pairs = integer("verify", "pairs", c.pairs);
    if (c.samples < 1 || c.pairs < 1)
        throw ConfigError("[verify] samples/pairs: must be >= 1");

    c.out_dir = ini.get("output", "dir", c.out_dir);
    return c;
}

}  // namespace hilfer
