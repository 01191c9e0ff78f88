// Command-line front end: simulate writes snapshots + diagnostics, diagnose
// recomputes criterion norms from stored snapshots, verify runs the estimate
// checks either live or against a snapshot directory.
#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"

#include "regwatch/config.hpp"
#include "regwatch/fft_engine.hpp"
#include "regwatch/run.hpp"
#include "regwatch/snapshot_io.hpp"
#include "regwatch/solver.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    long long seed = -1;
    int threads = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("-c,--config", args.config_path, "run configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("-o,--out", args.out_dir, "override the configured output directory");
    cmd->add_option("--seed", args.seed, "override the initial-condition seed");
    cmd->add_option("--threads", args.threads, "FFT threads (default 1; >1 trades bitwise determinism for speed)")
        ->check(CLI::PositiveNumber)
        ->envname("REGWATCH_THREADS");
}

regwatch::RunConfig load(const CommonArgs& args) {
    regwatch::fft::set_threads(args.threads);
    regwatch::RunConfig cfg = regwatch::load_config(args.config_path);
    if (!args.out_dir.empty()) cfg.output_directory = args.out_dir;
    if (args.seed >= 0) cfg.solver.initial.seed = std::uint64_t(args.seed);
    return cfg;
}

void print_outcome(const regwatch::VerifyOutcome& outcome) {
    for (const regwatch::CheckResult& r : outcome.results) {
        const char* tag = r.skipped ? "SKIP" : (r.passed ? "PASS" : "FAIL");
        std::printf("%-14s %s  %s\n", r.name.c_str(), tag, r.detail.c_str());
    }
    std::printf("result: %s\n", outcome.all_passed ? "PASS" : "FAIL");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"incompressible flow solver with geometric regularity diagnostics"};
    app.require_subcommand(1);

    CommonArgs sim_args, diag_args, ver_args;
    std::string diag_snapshots, ver_snapshots;
    double tolerance_scale = 1.0;

    CLI::App* sim = app.add_subcommand("simulate", "run the solver and store snapshots");
    add_common(sim, sim_args);

    CLI::App* diag = app.add_subcommand("diagnose", "recompute criterion norms from snapshots");
    add_common(diag, diag_args);
    diag->add_option("-s,--snapshots", diag_snapshots, "directory holding stored snapshots")
        ->required()
        ->check(CLI::ExistingDirectory);

    CLI::App* ver = app.add_subcommand("verify", "run the estimate checks");
    add_common(ver, ver_args);
    ver->add_option("-s,--snapshots", ver_snapshots,
                    "check stored snapshots instead of a fresh run")
        ->check(CLI::ExistingDirectory);
    ver->add_option("--tolerance-scale", tolerance_scale,
                    "multiply every check tolerance by this factor")
        ->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            const regwatch::RunConfig cfg = load(sim_args);
            regwatch::run_simulate(cfg);
            std::printf("simulate: wrote %s\n", cfg.output_directory.c_str());
            return 0;
        }
        if (diag->parsed()) {
            const regwatch::RunConfig cfg = load(diag_args);
            regwatch::run_diagnose(cfg, diag_snapshots);
            std::printf("diagnose: wrote %s\n", cfg.output_directory.c_str());
            return 0;
        }
        regwatch::RunConfig cfg = load(ver_args);
        cfg.verify.tolerance_scale *= tolerance_scale;
        const regwatch::VerifyOutcome outcome =
            ver_snapshots.empty() ? regwatch::run_verify(cfg)
                                  : regwatch::run_verify(cfg, ver_snapshots);
        print_outcome(outcome);
        return outcome.all_passed ? 0 : 1;
    } catch (const regwatch::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const regwatch::InstabilityError& e) {
        std::fprintf(stderr, "run left the trustworthy regime: %s\n", e.what());
        return 3;
    } catch (const regwatch::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 4;
    } catch (const regwatch::SparseSamplingError& e) {
        std::fprintf(stderr, "sampling too sparse: %s\n", e.what());
        return 5;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
