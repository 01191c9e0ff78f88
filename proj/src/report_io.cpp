#include "regwatch/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "regwatch/snapshot_io.hpp"

namespace regwatch {

std::string format_value(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

// Short label for column headers: %g keeps 1 and 1.5 readable.
std::string short_value(double v) {
    if (std::isinf(v)) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

} // namespace

std::string criterion_column(const CriterionSpec& spec, std::size_t index) {
    std::string name = "c" + std::to_string(index) + "_" + criterion_name(spec.kind) +
                       "_g" + short_value(spec.gamma);
    if (spec.region.kind == Region::Kind::cylinder) name += "_cyl";
    return name;
}

void write_diagnostics_csv(const std::filesystem::path& path, const Trajectory& trajectory) {
    std::ofstream out = open_out(path);
    out << "t";
    for (double b : trajectory.betas) out << ",E_" << short_value(b);
    for (double b : trajectory.betas) out << ",D_" << short_value(b);
    for (double b : trajectory.betas) out << ",T_" << short_value(b);
    for (std::size_t i = 0; i < trajectory.criteria.size(); ++i)
        out << "," << criterion_column(trajectory.criteria[i], i);
    out << "\n";

    for (const DiagnosticSample& d : trajectory.diagnostics) {
        out << format_value(d.time);
        for (double v : d.energy) out << "," << format_value(v);
        for (double v : d.dissipation) out << "," << format_value(v);
        for (double v : d.production) out << "," << format_value(v);
        for (double v : d.criterion_norms) out << "," << format_value(v);
        out << "\n";
    }
    finish(out, path);
}

void write_criterion_csv(const std::filesystem::path& path,
                         const std::vector<double>& times,
                         const std::vector<CriterionSpec>& specs,
                         const std::vector<std::vector<double>>& series) {
    std::ofstream out = open_out(path);
    out << "t";
    for (std::size_t i = 0; i < specs.size(); ++i)
        out << "," << criterion_column(specs[i], i);
    out << "\n";
    for (std::size_t s = 0; s < times.size(); ++s) {
        out << format_value(times[s]);
        for (const std::vector<double>& column : series) out << "," << format_value(column[s]);
        out << "\n";
    }
    finish(out, path);
}

void write_summary(const std::filesystem::path& path,
                   const std::vector<std::pair<std::string, std::string>>& entries) {
    std::ofstream out = open_out(path);
    for (const auto& [key, value] : entries) out << key << " = " << value << "\n";
    finish(out, path);
}

} // namespace regwatch
