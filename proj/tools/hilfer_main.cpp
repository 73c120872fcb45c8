// Command-line front end: solve | verify | mlf | model-export.

#include <CLI11.hpp>

#include "hilfer/cli_app.hpp"

using namespace hilfer;

int main(int argc, char** argv) {
    CLI::App app{"Hilfer fractional integro-differential equation solver and estimate verifier"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    long long seed = -1;
    int threads = 1;
    app.add_option("--config", config_path, "run configuration file (INI)");
    app.add_option("--out", out_dir, "output directory (overrides [output] dir)");
    app.add_option("--seed", seed, "seed override for sampling-based checks");
    app.add_option("--threads", threads, "worker threads for solver sweeps")
        ->check(CLI::Range(1, 256));

    auto* solve = app.add_subcommand("solve", "run a Picard solve and write CSV artifacts");
    auto* verify = app.add_subcommand("verify", "run estimate checks and write reports");
    auto* model_export = app.add_subcommand("model-export", "write the model matrix as text");

    auto* mlf = app.add_subcommand("mlf", "print a Mittag-Leffler value table");
    double ml_alpha = 0.5, ml_beta = 1.0;
    std::vector<double> ml_z;
    mlf->add_option("--alpha", ml_alpha, "series order")->required();
    mlf->add_option("--beta", ml_beta, "second parameter");
    mlf->add_option("z", ml_z, "arguments (z <= 0 uses the global evaluator)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : cli::kExitUsage;
    }

    global_thread_count() = threads;

    try {
        if (mlf->parsed()) return cli::run_mlf(ml_alpha, ml_beta, ml_z);

        RunConfig cfg;
        if (!config_path.empty()) cfg = RunConfig::from_ini(parse_ini_file(config_path));
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
        std::string dir = out_dir.empty() ? cfg.out_dir : out_dir;

        if (solve->parsed()) return cli::run_solve(cfg, dir);
        if (verify->parsed()) return cli::run_verify(cfg, dir);
        if (model_export->parsed()) return cli::run_model_export(cfg, dir);
    } catch (const NonConvergence& e) {
        cli::report_error(e);
        return cli::kExitNoConvergence;
    } catch (const Error& e) {
        cli::report_error(e);
        return cli::kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "ERROR:Internal:" << e.what() << "\n";
        return cli::kExitConfig;
    }
    return cli::kExitUsage;
}
