#include "regwatch/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "regwatch/exponents.hpp"
#include "regwatch/geometry.hpp"
#include "regwatch/norms.hpp"
#include "regwatch/report_io.hpp"
#include "regwatch/snapshot_io.hpp"
#include "regwatch/spectral_ops.hpp"
#include "regwatch/verify.hpp"

namespace regwatch {

namespace fs = std::filesystem;

namespace {

std::string snapshot_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "snapshot_%06zu.rgw", index);
    return buf;
}

fs::path prepare_output(const std::string& directory) {
    const fs::path dir = directory;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "'");
    return dir;
}

// Time window a criterion aggregates over: the full sampled slab, or the
// cylinder's trailing interval clipped to the samples.
TimeWindow spec_window(const CriterionSpec& spec, const std::vector<double>& times,
                       bool& clipped) {
    TimeWindow w{times.front(), times.back()};
    clipped = false;
    if (spec.region.kind != Region::Kind::cylinder) return w;
    const double begin = spec.region.top_time - spec.region.radius * spec.region.radius;
    const double end = spec.region.top_time;
    if (end < times.front() - 1e-12 || begin > times.back() + 1e-12)
        throw ConfigError("criterion cylinder window lies outside the sampled interval");
    w.begin = begin;
    w.end = end;
    if (begin < times.front() - 1e-12) {
        w.begin = times.front();
        clipped = true;
    }
    if (end > times.back() + 1e-12) {
        w.end = times.back();
        clipped = true;
    }
    return w;
}

double window_mixed_norm(const std::vector<double>& times, const std::vector<double>& series,
                         double alpha, TimeWindow window) {
    // A single sample spans a zero-length window: the sup is the sample, any
    // finite-exponent integral is zero.
    if (times.size() == 1 && !std::isinf(alpha)) return 0.0;
    return mixed_norm(times, series, alpha, window);
}

// A cylinder the grid cannot see is a configuration mistake, not a data error;
// reject it before any norm computation trips over the empty mask.
void require_populated_cylinders(const SpectralGrid& grid,
                                 const std::vector<CriterionSpec>& criteria) {
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const Region& r = criteria[i].region;
        if (r.kind != Region::Kind::cylinder) continue;
        const std::vector<std::uint8_t> mask = cylinder_mask(grid, r.center, r.radius);
        if (std::count(mask.begin(), mask.end(), std::uint8_t(1)) == 0) {
            throw ConfigError("criterion " + std::to_string(i) +
                              ": cylinder contains no lattice points at n = " +
                              std::to_string(grid.n()));
        }
    }
}

std::vector<fs::path> snapshot_files(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const fs::directory_entry& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        const std::string name = e.path().filename().string();
        if (name.starts_with("snapshot_") && name.ends_with(".rgw")) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw IoError("no snapshot files in '" + dir.string() + "'");
    return files;
}

std::string pass_line(const CheckResult& r) {
    const char* tag = r.skipped ? "SKIP" : (r.passed ? "PASS" : "FAIL");
    return r.name + ": " + tag + " " + r.detail;
}

void write_verify_report(const fs::path& dir, const VerifyOutcome& outcome) {
    DirectoryLock lock(dir);
    std::ofstream out(dir / "verify_report.txt", std::ios::trunc);
    if (!out) throw IoError("cannot write verify report in '" + dir.string() + "'");
    for (const CheckResult& r : outcome.results) out << pass_line(r) << "\n";
    out << "result = " << (outcome.all_passed ? "PASS" : "FAIL") << "\n";
    if (!out) throw IoError("failed writing verify report in '" + dir.string() + "'");
    out.close();
    write_manifest(dir, {"verify_report.txt"});
}

bool close(double a, double b) {
    return a == b || std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

std::size_t find_kappa_beta_series(const Trajectory& traj, double beta, double gamma) {
    for (std::size_t i = 0; i < traj.criteria.size(); ++i) {
        const CriterionSpec& s = traj.criteria[i];
        if (s.kind == CriterionKind::kappa_beta && close(s.parameter, beta) &&
            close(s.gamma, gamma) && s.region.kind == Region::Kind::full) {
            return i;
        }
    }
    throw ConfigError("verify needs a recorded kappa_beta criterion at beta = " +
                      format_value(beta) + ", gamma = " + format_value(gamma) +
                      " on the full domain");
}

CheckResult check_balance(const RunConfig& cfg, const Trajectory& traj) {
    CheckResult r{"balance"};
    if (traj.diagnostics.size() < 3) {
        throw SparseSamplingError("energy balance needs at least 3 diagnostic samples, have " +
                                  std::to_string(traj.diagnostics.size()));
    }
    const double tol = cfg.verify.balance_tolerance * cfg.verify.tolerance_scale;
    const BalanceResiduals rep = energy_balance_residual(traj, cfg.verify.beta, tol);
    if (rep.sparse) {
        throw SparseSamplingError(
            "energy moves too much between diagnostic samples for a trustworthy residual");
    }
    r.passed = rep.within;
    r.detail = "relative residual " + format_value(rep.relative) + ", tolerance " + format_value(tol);
    return r;
}

CheckResult check_holder(const RunConfig& cfg, const Trajectory& traj) {
    CheckResult r{"holder"};
    const double tol = cfg.verify.holder_tolerance * cfg.verify.tolerance_scale;
    const HolderMargins rep = holder_triple_check(traj, cfg.verify.beta, cfg.verify.gamma, tol);
    double worst = 0.0;
    for (std::size_t i = 0; i < rep.times.size(); ++i)
        worst = std::min({worst, rep.positivity_margin[i], rep.holder_margin[i]});
    r.passed = rep.holds;
    r.detail = "worst margin " + format_value(worst) + " over " +
               std::to_string(rep.times.size()) + " snapshots, tolerance " + format_value(tol);
    return r;
}

CheckResult check_young(const RunConfig& cfg, const Trajectory& traj) {
    CheckResult r{"young"};
    const std::size_t ci = find_kappa_beta_series(traj, cfg.verify.beta, cfg.verify.gamma);
    std::size_t b = traj.betas.size();
    for (std::size_t i = 0; i < traj.betas.size(); ++i)
        if (close(traj.betas[i], cfg.verify.beta)) b = i;
    if (b == traj.betas.size())
        throw ConfigError("verify beta is not among the recorded solver betas");
    const double texp = young_time_exponent(rational_approx(cfg.verify.gamma)).value();

    double worst = 0.0;
    bool ok = true;
    for (const DiagnosticSample& d : traj.diagnostics) {
        const double a = d.criterion_norms[ci];
        const double x = std::sqrt(std::max(0.0, 2.0 * d.energy[b]));
        const double y = std::sqrt(std::max(0.0, d.dissipation[b]));
        const double margin = young_split_margin(a, x, y, cfg.verify.gamma);
        const double scale = 0.5 * std::pow(a, texp) * x * x + 0.5 * y * y;
        if (margin < -1e-12 * std::max(1.0, scale)) ok = false;
        worst = std::min(worst, margin);
    }
    r.passed = ok;
    r.detail = "worst margin " + format_value(worst) + " over " +
               std::to_string(traj.diagnostics.size()) + " samples";
    return r;
}

CheckResult check_interpolation(const RunConfig& cfg, const Trajectory& traj) {
    CheckResult r{"interpolation"};
    const PqPair pq = pq_exponents(cfg.verify.gamma, cfg.verify.beta);
    double max_ratio = 0.0;
    std::size_t used = 0;
    for (const TrajectorySample& s : traj.snapshots) {
        try {
            const InterpolationResult rep = interpolation_check(
                s.velocity, InterpolationKind::vorticity, pq.p.value(), cfg.verify.beta);
            max_ratio = std::max(max_ratio, rep.ratio);
            ++used;
        } catch (const std::invalid_argument&) {
            // degenerate snapshot (zero or constant field): nothing to measure
        }
    }
    if (used == 0) {
        r.skipped = true;
        r.passed = true;
        r.detail = "no nondegenerate snapshots";
        return r;
    }
    r.passed = max_ratio <= cfg.verify.interpolation_constant;
    r.detail = "max ratio " + format_value(max_ratio) + " over " + std::to_string(used) +
               " snapshots, calibrated constant " +
               format_value(cfg.verify.interpolation_constant);
    return r;
}

CheckResult check_gronwall(const RunConfig& cfg, const Trajectory& traj) {
    CheckResult r{"gronwall"};
    find_kappa_beta_series(traj, cfg.verify.beta, cfg.verify.gamma);
    const GronwallReport rep =
        gronwall_envelope(traj, cfg.verify.gamma, cfg.verify.beta, cfg.verify.constant);
    r.passed = rep.holds;
    r.detail = "sup " + format_value(rep.sup_value) + " vs envelope " +
               format_value(rep.envelope) + ", minimal constant " +
               format_value(rep.minimal_constant);
    return r;
}

bool has_smallness_form(const CriterionSpec& spec) {
    switch (spec.kind) {
        case CriterionKind::kappa_beta:
        case CriterionKind::kappa:
        case CriterionKind::weighted_kappa: {
            AdmissibleExponents shape;
            shape.form = spec.kind == CriterionKind::kappa
                             ? CriterionForm::kappa_smallness
                             : (spec.kind == CriterionKind::kappa_beta
                                    ? CriterionForm::kappa_beta_smallness
                                    : CriterionForm::weighted_smallness);
            shape.parameter = rational_approx(spec.parameter);
            shape.gamma = rational_approx(spec.gamma);
            shape.alpha = std::isinf(spec.alpha) ? Rational::infinity()
                                                 : rational_approx(spec.alpha);
            return check_exponents(shape).admissible;
        }
        case CriterionKind::eta: return false;
    }
    return false;
}

CheckResult check_smallness(const RunConfig& cfg, const Trajectory& traj) {
    CheckResult r{"smallness"};
    double worst = 0.0;
    std::size_t used = 0;
    bool ok = true;
    for (const CriterionSpec& spec : traj.criteria) {
        if (!has_smallness_form(spec)) continue;
        const SmallnessReport rep = smallness_monitor(traj, spec, cfg.verify.epsilon);
        worst = std::max(worst, rep.value);
        ok = ok && rep.small;
        ++used;
    }
    if (used == 0) {
        r.skipped = true;
        r.passed = true;
        r.detail = "no recorded criterion has a smallness form";
        return r;
    }
    r.passed = ok;
    r.detail = "largest monitored value " + format_value(worst) + " vs epsilon " +
               format_value(cfg.verify.epsilon) + " over " + std::to_string(used) +
               " criteria";
    return r;
}

CheckResult check_local_energy(const RunConfig& cfg, const Trajectory& traj, bool live) {
    CheckResult r{"local_energy"};
    const double tol = cfg.verify.local_energy_tolerance * cfg.verify.tolerance_scale;
    LocalEnergyReport rep;
    if (live) {
        // step-resolution quadrature from a fresh run of the same configuration
        rep = local_energy_residual(cfg.solver, TestWeight{}, tol);
    } else {
        if (traj.snapshots.size() < 3) {
            throw SparseSamplingError(
                "local energy residual needs at least 3 snapshots, have " +
                std::to_string(traj.snapshots.size()));
        }
        rep = local_energy_residual(traj, TestWeight{}, tol);
    }
    r.passed = rep.within;
    r.detail = "relative residual " + format_value(rep.relative) + ", tolerance " +
               format_value(tol);
    return r;
}

VerifyOutcome verify_trajectory(const RunConfig& cfg, const Trajectory& traj, bool live) {
    const std::vector<std::string>& checks =
        cfg.verify.checks.empty() ? known_check_names() : cfg.verify.checks;
    VerifyOutcome out;
    for (const std::string& name : checks) {
        CheckResult r;
        try {
            if (name == "balance") r = check_balance(cfg, traj);
            else if (name == "holder") r = check_holder(cfg, traj);
            else if (name == "young") r = check_young(cfg, traj);
            else if (name == "interpolation") r = check_interpolation(cfg, traj);
            else if (name == "gronwall") r = check_gronwall(cfg, traj);
            else if (name == "smallness") r = check_smallness(cfg, traj);
            else if (name == "local_energy") r = check_local_energy(cfg, traj, live);
            else throw ConfigError("unknown check '" + name + "'");
        } catch (const std::invalid_argument& e) {
            // estimate-chain preconditions (missing series, bad exponents)
            throw ConfigError(std::string("check '") + name + "': " + e.what());
        } catch (const std::out_of_range& e) {
            throw ConfigError(std::string("check '") + name + "': " + e.what());
        }
        out.all_passed = out.all_passed && r.passed;
        out.results.push_back(std::move(r));
    }
    return out;
}

} // namespace

void run_simulate(const RunConfig& config) {
    require_populated_cylinders(SpectralGrid(config.solver.n), config.solver.criteria);
    const fs::path dir = prepare_output(config.output_directory);
    DirectoryLock lock(dir);

    const Trajectory traj = simulate(config.solver);

    std::vector<std::string> names;
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
        const std::string name = snapshot_name(i);
        write_snapshot(dir / name, traj.snapshots[i].time, traj.snapshots[i].velocity);
        names.push_back(name);
    }
    write_diagnostics_csv(dir / "diagnostics.csv", traj);
    names.push_back("diagnostics.csv");
    save_config(config, (dir / "run_config.cfg").string());
    names.push_back("run_config.cfg");
    write_manifest(dir, names);
}

Trajectory load_trajectory(const RunConfig& config, const fs::path& snapshot_dir) {
    check_manifest(snapshot_dir);

    Trajectory traj;
    traj.nu = config.solver.nu;
    traj.betas = config.solver.betas;
    traj.criteria = config.solver.criteria;

    std::vector<std::vector<std::uint8_t>> masks(traj.criteria.size());
    bool masks_ready = false;

    for (const fs::path& file : snapshot_files(snapshot_dir)) {
        LoadedSnapshot snap = read_snapshot(file);
        if (!traj.snapshots.empty()) {
            if (snap.velocity.grid() != traj.snapshots.front().velocity.grid())
                throw IoError("snapshots disagree on the grid size");
            if (snap.time <= traj.snapshots.back().time)
                throw IoError("snapshot times do not increase");
        }
        if (!masks_ready) {
            require_populated_cylinders(snap.velocity.grid(), traj.criteria);
            for (std::size_t i = 0; i < traj.criteria.size(); ++i) {
                const Region& r = traj.criteria[i].region;
                if (r.kind == Region::Kind::cylinder)
                    masks[i] = cylinder_mask(snap.velocity.grid(), r.center, r.radius);
            }
            masks_ready = true;
        }

        const VectorField& v = snap.velocity;
        DiagnosticSample d;
        d.time = snap.time;
        d.max_velocity = max_velocity(v);
        d.tail_fraction = tail_energy_fraction(v);
        const VectorField n1 = nonlinear_rotational(v);
        for (double beta : traj.betas) {
            const EnergyTriple e = energy_diagnostics(v, n1, beta);
            d.energy.push_back(e.energy);
            d.dissipation.push_back(e.dissipation);
            d.production.push_back(e.production);
        }
        for (std::size_t c = 0; c < traj.criteria.size(); ++c) {
            const CriterionSpec& spec = traj.criteria[c];
            const CriterionField f = criterion_field(v, spec);
            d.criterion_norms.push_back(masks[c].empty()
                                            ? spatial_norm(f.values, spec.gamma)
                                            : spatial_norm(f.values, spec.gamma, masks[c]));
        }
        traj.diagnostics.push_back(std::move(d));
        traj.snapshots.push_back(TrajectorySample{snap.time, std::move(snap.velocity)});
    }
    return traj;
}

void run_diagnose(const RunConfig& config, const fs::path& snapshot_dir) {
    if (config.solver.criteria.empty())
        throw ConfigError("diagnose needs at least one [criterion] section");

    const Trajectory traj = load_trajectory(config, snapshot_dir);
    const std::vector<CriterionSpec>& specs = traj.criteria;

    std::vector<double> times;
    for (const DiagnosticSample& d : traj.diagnostics) times.push_back(d.time);
    std::vector<std::vector<double>> series(specs.size(), std::vector<double>(times.size()));
    for (std::size_t s = 0; s < times.size(); ++s)
        for (std::size_t c = 0; c < specs.size(); ++c)
            series[c][s] = traj.diagnostics[s].criterion_norms[c];

    const fs::path out = prepare_output(config.output_directory);
    DirectoryLock lock(out);
    write_criterion_csv(out / "criteria.csv", times, specs, series);

    const SpectralGrid& grid = traj.snapshots.front().velocity.grid();
    std::vector<std::pair<std::string, std::string>> summary;
    summary.emplace_back("samples", std::to_string(times.size()));
    summary.emplace_back("n", std::to_string(grid.n()));
    summary.emplace_back("t_begin", format_value(times.front()));
    summary.emplace_back("t_end", format_value(times.back()));
    for (std::size_t c = 0; c < specs.size(); ++c) {
        const CriterionSpec& spec = specs[c];
        const std::string col = criterion_column(spec, c);
        bool clipped = false;
        const TimeWindow w = spec_window(spec, times, clipped);
        const double mixed = window_mixed_norm(times, series[c], spec.alpha, w);
        summary.emplace_back(col + ".alpha", format_value(spec.alpha));
        summary.emplace_back(col + ".mixed_norm", format_value(mixed));
        summary.emplace_back(col + ".spatial_max",
                             format_value(*std::max_element(series[c].begin(), series[c].end())));
        if (spec.region.kind == Region::Kind::cylinder) {
            const std::vector<std::uint8_t> mask =
                cylinder_mask(grid, spec.region.center, spec.region.radius);
            const std::size_t points =
                std::size_t(std::count(mask.begin(), mask.end(), std::uint8_t(1)));
            summary.emplace_back(col + ".mask_points", std::to_string(points));
            summary.emplace_back(col + ".window_begin", format_value(w.begin));
            summary.emplace_back(col + ".window_end", format_value(w.end));
            summary.emplace_back(col + ".window_clipped", clipped ? "1" : "0");
        }
    }
    write_summary(out / "summary.txt", summary);
    write_manifest(out, {"criteria.csv", "summary.txt"});
}

VerifyOutcome run_verify(const RunConfig& config) {
    require_populated_cylinders(SpectralGrid(config.solver.n), config.solver.criteria);
    const Trajectory traj = simulate(config.solver);
    const VerifyOutcome outcome = verify_trajectory(config, traj, true);
    write_verify_report(prepare_output(config.output_directory), outcome);
    return outcome;
}

VerifyOutcome run_verify(const RunConfig& config, const fs::path& snapshot_dir) {
    const Trajectory traj = load_trajectory(config, snapshot_dir);
    const VerifyOutcome outcome = verify_trajectory(config, traj, false);
    write_verify_report(prepare_output(config.output_directory), outcome);
    return outcome;
}

} // namespace regwatch
