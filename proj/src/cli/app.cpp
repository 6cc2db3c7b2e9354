#include <CLI11.hpp>

#include <ostream>

#include "roughwave/cli.hpp"

namespace roughwave {

namespace {

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> suite;
    std::optional<int> lambda;
    std::optional<std::string> regime;
    std::optional<int> jobs;
    std::string dir;
};

void common_flags(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config, "YAML configuration file");
    sub->add_option("--seed", f.seed, "random seed");
    sub->add_option("--out", f.out, "output directory");
}

RunConfig resolve(const Flags& f) {
    RunConfig cfg = load_config(f.config);
    if (f.seed) cfg.seed = *f.seed;
    if (f.out) cfg.out = *f.out;
    if (f.suite) cfg.suite = *f.suite;
    if (f.lambda) cfg.lambda = *f.lambda;
    if (f.regime) cfg.regime = *f.regime;
    if (f.jobs) cfg.jobs = *f.jobs;
    try {
        cfg.validate();
    } catch (const std::logic_error& e) {
        throw ConfigError(std::string("command line: ") + e.what());
    }
    return cfg;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Pseudospectral solver and verification harness for damped semilinear waves", "roughwave"};
    app.require_subcommand(1);
    Flags f;

    auto* kernels = app.add_subcommand("kernels", "write the kernel sweep CSV");
    common_flags(kernels, f);
    kernels->add_option("--regime", f.regime, "keep one regime: effective, scale_invariant or non_effective");

    auto* verify = app.add_subcommand("verify", "run verification suites");
    common_flags(verify, f);
    verify->add_option("--suite", f.suite, "suite name or 'all'");
    verify->add_option("--jobs", f.jobs, "worker threads");

    auto* solve = app.add_subcommand("solve", "solve the small-data problem and persist the record");
    common_flags(solve, f);
    solve->add_option("--lambda", f.lambda, "scale parameter of the problem");

    auto* scale = app.add_subcommand("scale", "large-data pipeline: select a scale, solve, map back");
    common_flags(scale, f);
    scale->add_option("--lambda", f.lambda, "use this scale if admissible");

    auto* report = app.add_subcommand("report", "aggregate persisted outputs under a directory");
    report->add_option("dir", f.dir, "directory to scan")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (report->parsed()) return cmd_report(f.dir, out, err);
        const RunConfig cfg = resolve(f);
        if (kernels->parsed()) return cmd_kernels(cfg, out, err);
        if (verify->parsed()) return cmd_verify(cfg, out, err);
        if (solve->parsed()) return cmd_solve(cfg, out, err);
        return cmd_scale(cfg, out, err);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitSolverFailed;
    }
}

}  // namespace roughwave
