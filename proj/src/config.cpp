#include "regwatch/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "regwatch/norms.hpp"

namespace regwatch {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

[[noreturn]] void fail(int line, const std::string& what) {
    throw ConfigError("config line " + std::to_string(line) + ": " + what);
}

double to_double(int line, const std::string& key, const std::string& value) {
    if (value == "inf") return inf_exponent;
    try {
        std::size_t pos = 0;
        const double d = std::stod(value, &pos);
        if (pos != value.size()) fail(line, key + ": trailing characters in '" + value + "'");
        if (std::isnan(d)) fail(line, key + ": not a number");
        return d;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        fail(line, key + ": cannot parse '" + value + "' as a number");
    }
}

int to_int(int line, const std::string& key, const std::string& value) {
    int out = 0;
    const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || p != value.data() + value.size())
        fail(line, key + ": cannot parse '" + value + "' as an integer");
    return out;
}

std::uint64_t to_u64(int line, const std::string& key, const std::string& value) {
    std::uint64_t out = 0;
    const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || p != value.data() + value.size())
        fail(line, key + ": cannot parse '" + value + "' as an unsigned integer");
    return out;
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string item;
    std::stringstream ss(value);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> to_double_list(int line, const std::string& key, const std::string& value) {
    std::vector<double> out;
    for (const std::string& item : split_list(value)) out.push_back(to_double(line, key, item));
    if (out.empty()) fail(line, key + ": empty list");
    return out;
}

InitialCondition::Kind to_initial_kind(int line, const std::string& value) {
    if (value == "taylor_green") return InitialCondition::Kind::taylor_green;
    if (value == "abc") return InitialCondition::Kind::abc;
    if (value == "random_divfree") return InitialCondition::Kind::random_divfree;
    if (value == "zero") return InitialCondition::Kind::zero;
    fail(line, "unknown initial kind '" + value + "'");
}

CriterionKind to_criterion_kind(int line, const std::string& value) {
    if (value == "kappa_beta") return CriterionKind::kappa_beta;
    if (value == "kappa") return CriterionKind::kappa;
    if (value == "eta") return CriterionKind::eta;
    if (value == "weighted_kappa") return CriterionKind::weighted_kappa;
    fail(line, "unknown criterion kind '" + value + "'");
}

// Cylinder geometry is collected per [criterion] section and assembled once
// the section is complete, so the keys may appear in any order.
struct CriterionStage {
    CriterionSpec spec;
    bool cylinder = false;
    std::array<double, 3> center{0.0, 0.0, 0.0};
    double top_time = 0.0;
    double radius = 0.0;
    int line = 0;
};

std::string fmt(double v) {
    if (std::isinf(v)) return "inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_list(const std::vector<double>& vs) {
    std::string out;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (i) out += ", ";
        out += fmt(vs[i]);
    }
    return out;
}

const char* initial_kind_name(InitialCondition::Kind k) {
    switch (k) {
        case InitialCondition::Kind::taylor_green: return "taylor_green";
        case InitialCondition::Kind::abc: return "abc";
        case InitialCondition::Kind::random_divfree: return "random_divfree";
        case InitialCondition::Kind::zero: return "zero";
    }
    return "taylor_green";
}

const char* criterion_kind_name(CriterionKind k) {
    switch (k) {
        case CriterionKind::kappa_beta: return "kappa_beta";
        case CriterionKind::kappa: return "kappa";
        case CriterionKind::eta: return "eta";
        case CriterionKind::weighted_kappa: return "weighted_kappa";
    }
    return "kappa_beta";
}

} // namespace

const std::vector<std::string>& known_check_names() {
    static const std::vector<std::string> names = {
        "balance", "holder", "young", "interpolation",
        "gronwall", "smallness", "local_energy",
    };
    return names;
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::vector<CriterionStage> stages;
    std::string section;

    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string s = trim(raw);
        if (s.empty()) continue;

        if (s.front() == '[') {
            if (s.back() != ']') fail(line, "malformed section header '" + s + "'");
            section = trim(s.substr(1, s.size() - 2));
            if (section == "criterion") {
                stages.push_back(CriterionStage{});
                stages.back().line = line;
            } else if (section != "solver" && section != "initial" &&
                       section != "output" && section != "verify") {
                fail(line, "unknown section [" + section + "]");
            }
            continue;
        }

        const std::size_t eq = s.find('=');
        if (eq == std::string::npos) fail(line, "expected 'key = value', got '" + s + "'");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty()) fail(line, "empty key");
        if (value.empty()) fail(line, key + ": empty value");
        if (section.empty()) fail(line, "key '" + key + "' outside any section");

        if (section == "solver") {
            SolverConfig& sc = cfg.solver;
            if (key == "n") {
                sc.n = to_int(line, key, value);
                if (sc.n < 8 || sc.n % 2 != 0) fail(line, "n must be even and >= 8");
            } else if (key == "dt") {
                sc.dt = to_double(line, key, value);
                if (!(sc.dt > 0.0)) fail(line, "dt must be positive");
            } else if (key == "end_time") {
                sc.end_time = to_double(line, key, value);
                if (!(sc.end_time > 0.0)) fail(line, "end_time must be positive");
            } else if (key == "nu") {
                sc.nu = to_double(line, key, value);
                if (!(sc.nu > 0.0)) fail(line, "nu must be positive");
            } else if (key == "cfl_limit") {
                sc.cfl_limit = to_double(line, key, value);
            } else if (key == "snapshot_stride") {
                sc.snapshot_stride = to_int(line, key, value);
                if (sc.snapshot_stride < 1) fail(line, "snapshot_stride must be >= 1");
            } else if (key == "diagnostic_stride") {
                sc.diagnostic_stride = to_int(line, key, value);
                if (sc.diagnostic_stride < 1) fail(line, "diagnostic_stride must be >= 1");
            } else if (key == "max_velocity_guard") {
                sc.max_velocity_guard = to_double(line, key, value);
            } else if (key == "tail_energy_limit") {
                sc.tail_energy_limit = to_double(line, key, value);
            } else if (key == "betas") {
                sc.betas = to_double_list(line, key, value);
                for (double b : sc.betas)
                    if (b < 1.0 || b > 2.0) fail(line, "every beta must lie in [1, 2]");
            } else {
                fail(line, "unknown key '" + key + "' in [solver]");
            }
        } else if (section == "initial") {
            InitialCondition& ic = cfg.solver.initial;
            if (key == "kind") ic.kind = to_initial_kind(line, value);
            else if (key == "A") ic.A = to_double(line, key, value);
            else if (key == "B") ic.B = to_double(line, key, value);
            else if (key == "C") ic.C = to_double(line, key, value);
            else if (key == "slope") ic.slope = to_double(line, key, value);
            else if (key == "seed") ic.seed = to_u64(line, key, value);
            else if (key == "amplitude") {
                ic.amplitude = to_double(line, key, value);
                if (!(ic.amplitude > 0.0)) fail(line, "amplitude must be positive");
            } else fail(line, "unknown key '" + key + "' in [initial]");
        } else if (section == "criterion") {
            CriterionStage& st = stages.back();
            if (key == "kind") st.spec.kind = to_criterion_kind(line, value);
            else if (key == "parameter") st.spec.parameter = to_double(line, key, value);
            else if (key == "gamma") st.spec.gamma = to_double(line, key, value);
            else if (key == "alpha") st.spec.alpha = to_double(line, key, value);
            else if (key == "direction_floor") st.spec.direction_floor = to_double(line, key, value);
            else if (key == "region") {
                if (value == "full") st.cylinder = false;
                else if (value == "cylinder") st.cylinder = true;
                else fail(line, "region must be 'full' or 'cylinder'");
            } else if (key == "center") {
                const std::vector<double> c = to_double_list(line, key, value);
                if (c.size() != 3) fail(line, "center needs exactly three coordinates");
                st.center = {c[0], c[1], c[2]};
            } else if (key == "top_time") st.top_time = to_double(line, key, value);
            else if (key == "radius") st.radius = to_double(line, key, value);
            else fail(line, "unknown key '" + key + "' in [criterion]");
        } else if (section == "output") {
            if (key == "directory") cfg.output_directory = value;
            else fail(line, "unknown key '" + key + "' in [output]");
        } else if (section == "verify") {
            VerifyToggles& vt = cfg.verify;
            if (key == "checks") {
                vt.checks = split_list(value);
                for (const std::string& c : vt.checks) {
                    const auto& known = known_check_names();
                    if (std::find(known.begin(), known.end(), c) == known.end())
                        fail(line, "unknown check '" + c + "'");
                }
            } else if (key == "beta") vt.beta = to_double(line, key, value);
            else if (key == "gamma") vt.gamma = to_double(line, key, value);
            else if (key == "constant") vt.constant = to_double(line, key, value);
            else if (key == "interpolation_constant") vt.interpolation_constant = to_double(line, key, value);
            else if (key == "epsilon") vt.epsilon = to_double(line, key, value);
            else if (key == "balance_tolerance") vt.balance_tolerance = to_double(line, key, value);
            else if (key == "holder_tolerance") vt.holder_tolerance = to_double(line, key, value);
            else if (key == "local_energy_tolerance") vt.local_energy_tolerance = to_double(line, key, value);
            else if (key == "tolerance_scale") {
                vt.tolerance_scale = to_double(line, key, value);
                if (!(vt.tolerance_scale > 0.0)) fail(line, "tolerance_scale must be positive");
            } else fail(line, "unknown key '" + key + "' in [verify]");
        }
    }

    for (const CriterionStage& st : stages) {
        CriterionSpec spec = st.spec;
        if (st.cylinder) {
            try {
                spec.region = Region::cylinder(st.center, st.top_time, st.radius);
            } catch (const std::exception& e) {
                fail(st.line, std::string("criterion cylinder: ") + e.what());
            }
        }
        cfg.solver.criteria.push_back(spec);
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string write_config_text(const RunConfig& config) {
    std::ostringstream out;
    const SolverConfig& sc = config.solver;
    out << "[solver]\n"
        << "n = " << sc.n << "\n"
        << "dt = " << fmt(sc.dt) << "\n"
        << "end_time = " << fmt(sc.end_time) << "\n"
        << "nu = " << fmt(sc.nu) << "\n"
        << "cfl_limit = " << fmt(sc.cfl_limit) << "\n"
        << "snapshot_stride = " << sc.snapshot_stride << "\n"
        << "diagnostic_stride = " << sc.diagnostic_stride << "\n"
        << "max_velocity_guard = " << fmt(sc.max_velocity_guard) << "\n"
        << "tail_energy_limit = " << fmt(sc.tail_energy_limit) << "\n"
        << "betas = " << fmt_list(sc.betas) << "\n";

    const InitialCondition& ic = sc.initial;
    out << "\n[initial]\n"
        << "kind = " << initial_kind_name(ic.kind) << "\n"
        << "A = " << fmt(ic.A) << "\n"
        << "B = " << fmt(ic.B) << "\n"
        << "C = " << fmt(ic.C) << "\n"
        << "slope = " << fmt(ic.slope) << "\n"
        << "seed = " << ic.seed << "\n"
        << "amplitude = " << fmt(ic.amplitude) << "\n";

    for (const CriterionSpec& spec : sc.criteria) {
        out << "\n[criterion]\n"
            << "kind = " << criterion_kind_name(spec.kind) << "\n"
            << "parameter = " << fmt(spec.parameter) << "\n"
            << "gamma = " << fmt(spec.gamma) << "\n"
            << "alpha = " << fmt(spec.alpha) << "\n"
            << "direction_floor = " << fmt(spec.direction_floor) << "\n";
        if (spec.region.kind == Region::Kind::cylinder) {
            out << "region = cylinder\n"
                << "center = " << fmt(spec.region.center[0]) << ", "
                << fmt(spec.region.center[1]) << ", " << fmt(spec.region.center[2]) << "\n"
                << "top_time = " << fmt(spec.region.top_time) << "\n"
                << "radius = " << fmt(spec.region.radius) << "\n";
        } else {
            out << "region = full\n";
        }
    }

    out << "\n[output]\n"
        << "directory = " << config.output_directory << "\n";

    const VerifyToggles& vt = config.verify;
    out << "\n[verify]\n";
    if (!vt.checks.empty()) {
        out << "checks = ";
        for (std::size_t i = 0; i < vt.checks.size(); ++i) {
            if (i) out << ", ";
            out << vt.checks[i];
        }
        out << "\n";
    }
    out << "beta = " << fmt(vt.beta) << "\n"
        << "gamma = " << fmt(vt.gamma) << "\n"
        << "constant = " << fmt(vt.constant) << "\n"
        << "interpolation_constant = " << fmt(vt.interpolation_constant) << "\n"
        << "epsilon = " << fmt(vt.epsilon) << "\n"
        << "balance_tolerance = " << fmt(vt.balance_tolerance) << "\n"
        << "holder_tolerance = " << fmt(vt.holder_tolerance) << "\n"
        << "local_energy_tolerance = " << fmt(vt.local_energy_tolerance) << "\n"
        << "tolerance_scale = " << fmt(vt.tolerance_scale) << "\n";
    return out.str();
}

void save_config(const RunConfig& config, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write config file '" + path + "'");
    out << write_config_text(config);
    if (!out) throw ConfigError("failed writing config file '" + path + "'");
}

} // namespace regwatch
