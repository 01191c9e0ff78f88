#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "regwatch/geometry.hpp"
#include "regwatch/solver.hpp"

namespace regwatch {

// 17-significant-digit decimal, "inf" for infinities; round-trips exactly.
std::string format_value(double v);

// Stable per-spec CSV/summary identifier: index, kind, gamma, region marker.
std::string criterion_column(const CriterionSpec& spec, std::size_t index);

// diagnostics.csv: t, then E/D/T per requested beta, then one column per
// recorded criterion spatial norm. Header row always present.
void write_diagnostics_csv(const std::filesystem::path& path, const Trajectory& trajectory);

// criteria.csv from offline diagnosis: t plus one column per spec.
void write_criterion_csv(const std::filesystem::path& path,
                         const std::vector<double>& times,
                         const std::vector<CriterionSpec>& specs,
                         const std::vector<std::vector<double>>& series);

void write_summary(const std::filesystem::path& path,
                   const std::vector<std::pair<std::string, std::string>>& entries);

} // namespace regwatch
