// qslab.cpp — Command-line driver for the named experiments and the acceptance suite
//
//   qslab <experiment> [options]     experiment ∈ fig1 fig2 fig3 sm1 sm2 sm3 sweep
//   qslab validate [--only NAME]...
//
// Exit status: 0 ok, 1 usage, 2 numerical failure, 3 acceptance failure.

#include <cstdint>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "qslab/acceptance.hpp"
#include "qslab/experiments.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_numerical = 2;
constexpr int exit_acceptance = 3;

struct Flag {
    const char* cli;
    const char* key;
    const char* help;
};

// Every flag maps 1:1 onto a config-file key.
constexpr Flag value_flags[] = {
    {"--eta", "eta", "coupling constant"},
    {"--s", "s", "spectral exponent"},
    {"--omega-c", "omega_c", "cutoff frequency"},
    {"--tau-max", "tau_max", "evolution horizon"},
    {"--dt", "dt", "solver time step"},
    {"--eta-grid", "eta_grid", "coupling grid a:b:n"},
    {"--omega-c-grid", "omega_c_grid", "cutoff grid a:b:n"},
    {"--tau-grid", "tau_grid", "evaluation times a:b:n"},
    {"--n-modes", "n_modes", "discrete bath modes"},
    {"--n-traj", "n_traj", "stochastic trajectories"},
    {"--seed", "seed", "noise seed (64-bit unsigned)"},
    {"--jobs", "jobs", "worker threads"},
    {"--out", "out", "output CSV path"},
};

int run_validate(const std::vector<std::string>& only, const std::vector<std::pair<std::string, std::string>>& flags) {
    qslab::acceptance::Options opt;
    opt.jobs = qslab::default_jobs();
    for (const auto& [key, value] : flags) {
        if (key == "jobs") opt.jobs = qslab::parse_unsigned(value, key);
        else if (key == "dt") opt.dt = qslab::parse_double(value, key);
        else if (key == "seed") opt.seed = qslab::parse_unsigned(value, key);
        else throw qslab::ConfigError("validate: option '" + key + "' is not used by the acceptance suite");
    }
    const auto results = qslab::acceptance::run(only, opt, std::cout);
    std::size_t failed = 0;
    for (const auto& r : results) failed += !r.passed;
    std::cout << results.size() - failed << "/" << results.size() << " checks passed" << std::endl;
    return failed == 0 ? exit_ok : exit_acceptance;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum speed limit laboratory for a dissipative two-level system"};
    app.set_version_flag("--version", "qslab 1.0");
    std::string experiment;
    std::string config_path;
    std::vector<std::string> only;
    app.add_option("experiment", experiment, "fig1 | fig2 | fig3 | sm1 | sm2 | sm3 | sweep | validate")->required();
    app.add_option("--config", config_path, "key = value file; flags override it");
    app.add_option("--only", only, "validate: run only the named checks")->delimiter(',');

    std::vector<std::string> values(std::size(value_flags));
    std::vector<CLI::Option*> options;
    for (std::size_t i = 0; i < std::size(value_flags); ++i)
        options.push_back(app.add_option(value_flags[i].cli, values[i], value_flags[i].help));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    std::vector<std::pair<std::string, std::string>> flags;
    for (std::size_t i = 0; i < options.size(); ++i)
        if (options[i]->count() > 0) flags.emplace_back(value_flags[i].key, values[i]);

    try {
        if (experiment == "validate") {
            if (!config_path.empty()) throw qslab::ConfigError("validate: --config is not supported");
            return run_validate(only, flags);
        }
        if (!only.empty()) throw qslab::ConfigError("--only applies to validate");
        const auto file = config_path.empty() ? qslab::ConfigAssignments{} : qslab::read_config_file(config_path);
        qslab::ExperimentConfig cfg = qslab::resolve_config(experiment, file, flags);
        if (!file.contains("jobs") && !app.get_option("--jobs")->count()) cfg.jobs = qslab::default_jobs();
        const qslab::ExperimentResult result = qslab::run_experiment(cfg);
        for (const auto& path : qslab::write_result(result)) std::cerr << "wrote " << path.string() << "\n";
        if (result.failures() > 0) {
            std::cerr << result.failures() << " rows failed; see the status column\n";
            return exit_numerical;
        }
        return exit_ok;
    } catch (const qslab::ConfigError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const qslab::Error& e) {
        std::cerr << "numerical failure (" << e.code() << "): " << e.what() << "\n";
        return exit_numerical;
    }
}
