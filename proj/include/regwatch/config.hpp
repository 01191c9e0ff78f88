#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "regwatch/solver.hpp"

namespace regwatch {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Which estimate checks `verify` runs, plus their thresholds. `constant` is
// the calibrated envelope constant and `interpolation_constant` the calibrated
// convexity constant; both are inputs here, produced by earlier runs.
struct VerifyToggles {
    std::vector<std::string> checks; // empty means every check
    double beta = 1.0;
    double gamma = 6.0;
    double constant = 1.0;
    double interpolation_constant = 2.0;
    double epsilon = 0.1;
    double balance_tolerance = 1e-4;
    double holder_tolerance = 1e-12;
    double local_energy_tolerance = 1e-5;
    double tolerance_scale = 1.0;
};

struct RunConfig {
    SolverConfig solver;
    std::string output_directory = "out";
    VerifyToggles verify;
};

const std::vector<std::string>& known_check_names();

// Line-oriented key = value format with [solver], [initial], [criterion]
// (repeatable), [output], and [verify] sections; '#' starts a comment.
// Unknown sections or keys fail with the offending line number. Values written
// by write_config_text parse back to the identical configuration.
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);
std::string write_config_text(const RunConfig& config);
void save_config(const RunConfig& config, const std::string& path);

} // namespace regwatch
