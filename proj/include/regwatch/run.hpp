#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "regwatch/config.hpp"
#include "regwatch/solver.hpp"

namespace regwatch {

// A requested residual check cannot be answered at the available sampling
// density; the caller gets a refusal instead of a misleading number.
struct SparseSamplingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Run the solver and persist snapshots, diagnostics.csv, the effective
// configuration, and a checksum manifest into config.output_directory.
void run_simulate(const RunConfig& config);

// Offline diagnosis: recompute criterion norms for every configured spec on
// the stored snapshots (manifest-checked first) and write criteria.csv plus a
// summary with the aggregated mixed norms.
void run_diagnose(const RunConfig& config, const std::filesystem::path& snapshot_dir);

struct CheckResult {
    std::string name;
    bool passed = false;
    bool skipped = false;
    std::string detail;
};

struct VerifyOutcome {
    bool all_passed = true;
    std::vector<CheckResult> results;
};

// Run the configured checks on a fresh simulation (live) or on a stored
// snapshot directory. Both write verify_report.txt into the output directory.
VerifyOutcome run_verify(const RunConfig& config);
VerifyOutcome run_verify(const RunConfig& config, const std::filesystem::path& snapshot_dir);

// Rebuild a Trajectory (diagnostics included) from stored snapshots.
Trajectory load_trajectory(const RunConfig& config, const std::filesystem::path& snapshot_dir);

} // namespace regwatch
