#include "regwatch/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "regwatch/spectral_ops.hpp"

namespace regwatch {

namespace {

bool close(double a, double b) {
    return a == b ||
           std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

bool same_region(const Region& a, const Region& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == Region::Kind::full) return true;
    return close(a.center[0], b.center[0]) && close(a.center[1], b.center[1]) &&
           close(a.center[2], b.center[2]) && close(a.top_time, b.top_time) &&
           close(a.radius, b.radius);
}

std::size_t beta_index(const Trajectory& traj, double beta) {
    for (std::size_t i = 0; i < traj.betas.size(); ++i) {
        if (close(traj.betas[i], beta)) return i;
    }
    throw std::invalid_argument("beta not among the trajectory diagnostics");
}

std::size_t criterion_index(const Trajectory& traj, const CriterionSpec& spec) {
    for (std::size_t i = 0; i < traj.criteria.size(); ++i) {
        const CriterionSpec& c = traj.criteria[i];
        if (c.kind == spec.kind && close(c.parameter, spec.parameter) &&
            close(c.gamma, spec.gamma) && same_region(c.region, spec.region) &&
            close(c.direction_floor, spec.direction_floor)) {
            return i;
        }
    }
    throw std::invalid_argument("criterion not recorded in the trajectory");
}

std::size_t kappa_beta_series(const Trajectory& traj, double beta,
                              double gamma) {
    for (std::size_t i = 0; i < traj.criteria.size(); ++i) {
        const CriterionSpec& c = traj.criteria[i];
        if (c.kind == CriterionKind::kappa_beta && close(c.parameter, beta) &&
            close(c.gamma, gamma) && c.region.kind == Region::Kind::full) {
            return i;
        }
    }
    throw std::invalid_argument(
        "trajectory lacks a full-domain kappa_beta series at this (beta, gamma)");
}

std::vector<double> diagnostic_times(const Trajectory& traj) {
    std::vector<double> t;
    t.reserve(traj.diagnostics.size());
    for (const DiagnosticSample& d : traj.diagnostics) t.push_back(d.time);
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (t[i] <= t[i - 1]) {
            throw std::invalid_argument("diagnostic times must increase");
        }
    }
    return t;
}

} // namespace

BalanceResiduals energy_balance_residual(const Trajectory& trajectory,
                                         double beta, double tolerance) {
    const std::size_t bi = beta_index(trajectory, beta);
    const auto& diag = trajectory.diagnostics;
    BalanceResiduals out;
    out.tolerance = tolerance;
    if (diag.size() < 2) {
        out.sparse = true;
        return out;
    }
    (void)diagnostic_times(trajectory);
    const double nu = trajectory.nu;

    double energy_max = 0.0;
    for (const DiagnosticSample& d : diag) {
        energy_max = std::max(energy_max, std::abs(d.energy[bi]));
        out.scale = std::max(out.scale, nu * d.dissipation[bi]);
    }

    out.midpoint_times.reserve(diag.size() - 1);
    out.residuals.reserve(diag.size() - 1);
    double max_jump = 0.0;
    for (std::size_t i = 0; i + 1 < diag.size(); ++i) {
        const DiagnosticSample& a = diag[i];
        const DiagnosticSample& b = diag[i + 1];
        const double h = b.time - a.time;
        const double de = b.energy[bi] - a.energy[bi];
        const double res = de / h +
                           nu * 0.5 * (a.dissipation[bi] + b.dissipation[bi]) -
                           0.5 * (a.production[bi] + b.production[bi]);
        out.midpoint_times.push_back(0.5 * (a.time + b.time));
        out.residuals.push_back(res);
        out.max_abs = std::max(out.max_abs, std::abs(res));
        max_jump = std::max(max_jump, std::abs(de));
    }
    out.sparse = energy_max > 0.0 && max_jump > 0.05 * energy_max;
    out.relative = out.scale > 0.0 ? out.max_abs / out.scale : out.max_abs;
    out.within = out.relative <= tolerance;
    return out;
}

HolderMargins holder_triple_check(const Trajectory& trajectory, double beta,
                                  double gamma, double tolerance) {
    if (trajectory.snapshots.empty()) {
        throw std::invalid_argument("trajectory has no snapshots");
    }
    HolderMargins out;
    out.exponents = pq_exponents(gamma, beta);
    out.tolerance = tolerance;
    out.holds = true;
    const double p = out.exponents.p.value();
    const double q = out.exponents.q.value();

    for (const TrajectorySample& sample : trajectory.snapshots) {
        const VectorField& v = sample.velocity;
        const SpectralGrid& g = v.grid();
        const double dv = std::pow(2.0 * SpectralGrid::pi / g.n(), 3);

        const VectorField w = curl(v);
        const VectorField lv = lambda_beta(v, beta);
        const CriterionField kb = kappa_beta_field(v, beta);

        auto vx = v[0].physical(), vy = v[1].physical(), vz = v[2].physical();
        auto wx = w[0].physical(), wy = w[1].physical(), wz = w[2].physical();
        auto lx = lv[0].physical(), ly = lv[1].physical(),
             lz = lv[2].physical();
        auto kv = kb.values.physical();

        double production = 0.0;
        double triple = 0.0;
        for (std::size_t s = 0; s < kv.size(); ++s) {
            const double cx = vy[s] * wz[s] - vz[s] * wy[s];
            const double cy = vz[s] * wx[s] - vx[s] * wz[s];
            const double cz = vx[s] * wy[s] - vy[s] * wx[s];
            production += cx * lx[s] + cy * ly[s] + cz * lz[s];
            const double wm =
                std::sqrt(wx[s] * wx[s] + wy[s] * wy[s] + wz[s] * wz[s]);
            const double lm =
                std::sqrt(lx[s] * lx[s] + ly[s] * ly[s] + lz[s] * lz[s]);
            triple += kv[s] * wm * lm;
        }
        production *= dv;
        triple *= dv;

        const double product = spatial_norm(kb.values, gamma) *
                               spatial_norm(w, p) * spatial_norm(lv, q);
        const double scale =
            std::max({std::abs(production), triple, product, 1e-300});

        out.times.push_back(sample.time);
        out.production.push_back(production);
        out.triple_integral.push_back(triple);
        out.norm_product.push_back(product);
        out.positivity_margin.push_back(triple - production);
        out.holder_margin.push_back(product - triple);
        if (triple - production < -tolerance * scale ||
            product - triple < -tolerance * scale) {
            out.holds = false;
        }
    }
    return out;
}

InterpolationResult interpolation_check(const VectorField& v,
                                        InterpolationKind kind,
                                        double exponent, double beta) {
    double mean_sq = 0.0;
    for (int c = 0; c < 3; ++c) {
        mean_sq += std::norm(v[c].spectral()[0]);
    }
    const double l2 = spatial_norm(v, 2.0);
    if (l2 == 0.0) throw std::invalid_argument("zero field is degenerate");
    const double vol = std::pow(2.0 * SpectralGrid::pi, 3);
    if (std::sqrt(mean_sq * vol) > 1e-10 * l2) {
        throw std::invalid_argument("field must have zero mean");
    }

    InterpolationResult out;
    out.kind = kind;
    switch (kind) {
        case InterpolationKind::vorticity: {
            out.powers = vorticity_powers(rational_approx(exponent),
                                          rational_approx(beta));
            out.lhs = spatial_norm(curl(v), exponent);
            out.factor_low = sobolev_norm(v, beta / 2.0);
            out.factor_high = sobolev_norm(v, 1.0 + beta / 2.0);
            break;
        }
        case InterpolationKind::fractional: {
            out.powers = fractional_powers(rational_approx(exponent),
                                           rational_approx(beta));
            out.lhs = spatial_norm(lambda_beta(v, beta), exponent);
            out.factor_low = sobolev_norm(v, beta / 2.0);
            out.factor_high = sobolev_norm(v, 1.0 + beta / 2.0);
            break;
        }
        case InterpolationKind::gradient: {
            const Rational g = rational_approx(exponent);
            out.powers = gradient_powers(g);
            const double r =
                g.is_infinite()
                    ? 2.0
                    : (Rational::of(2) * g / (g - Rational::of(2))).value();
            ScalarField mag(v.grid());
            std::span<double> m = mag.physical_mut();
            std::fill(m.begin(), m.end(), 0.0);
            for (int c = 0; c < 3; ++c) {
                const VectorField gc = gradient(v[c]);
                for (int d = 0; d < 3; ++d) {
                    auto gd = gc[d].physical();
                    for (std::size_t s = 0; s < m.size(); ++s) {
                        m[s] += gd[s] * gd[s];
                    }
                }
            }
            for (std::size_t s = 0; s < m.size(); ++s) m[s] = std::sqrt(m[s]);
            out.lhs = spatial_norm(mag, r);
            out.factor_low = sobolev_norm(v, 1.0);
            out.factor_high = sobolev_norm(v, 2.0);
            break;
        }
    }
    const double denom = std::pow(out.factor_low, out.powers.low.value()) *
                         std::pow(out.factor_high, out.powers.high.value());
    if (denom == 0.0) {
        throw std::invalid_argument("degenerate norms in the denominator");
    }
    out.ratio = out.lhs / denom;
    return out;
}

double young_split_margin(double factor, double energy_norm,
                          double gradient_norm, double gamma) {
    if (factor < 0.0 || energy_norm < 0.0 || gradient_norm < 0.0) {
        throw std::invalid_argument("split factors must be nonnegative");
    }
    const Rational g = rational_approx(gamma);
    const double time_exp = young_time_exponent(g).value();
    const double third = (Rational::of(3) * g.reciprocal()).value();
    const double e_low = 1.0 - third;
    const double e_high = 1.0 + third;
    const double product = factor * std::pow(energy_norm, e_low) *
                           std::pow(gradient_norm, e_high);
    const double bound =
        0.5 * e_low * std::pow(factor, time_exp) * energy_norm * energy_norm +
        0.5 * e_high * gradient_norm * gradient_norm;
    return bound - product;
}

GronwallReport gronwall_envelope(const Trajectory& trajectory, double gamma,
                                 double beta, double constant) {
    GronwallReport out;
    out.constant = constant;
    out.time_exponent = young_time_exponent(rational_approx(gamma));
    const double alpha = out.time_exponent.value();

    const std::size_t bi = beta_index(trajectory, beta);
    const std::size_t ci = kappa_beta_series(trajectory, beta, gamma);
    if (trajectory.snapshots.empty()) {
        throw std::invalid_argument("trajectory has no snapshots");
    }
    const std::vector<double> times = diagnostic_times(trajectory);
    if (times.size() < 2) {
        throw std::invalid_argument("need at least two diagnostic samples");
    }

    std::vector<double> norms;
    norms.reserve(times.size());
    for (const DiagnosticSample& d : trajectory.diagnostics) {
        norms.push_back(d.criterion_norms[ci]);
        out.sup_value = std::max(out.sup_value, 2.0 * d.energy[bi]);
    }
    const double mixed =
        mixed_norm(times, norms, alpha, TimeWindow{times.front(), times.back()});
    out.exponent_integral = std::pow(mixed, alpha);

    const double h0 = sobolev_norm_inhomogeneous(
        trajectory.snapshots.front().velocity, beta / 2.0);
    out.initial_value = h0 * h0;
    out.envelope = out.initial_value *
                   std::exp(constant * out.exponent_integral);
    out.holds = out.sup_value <= out.envelope * (1.0 + 1e-12);
    if (out.sup_value <= out.initial_value || out.initial_value == 0.0) {
        out.minimal_constant = 0.0;
    } else if (out.exponent_integral > 0.0) {
        out.minimal_constant =
            std::log(out.sup_value / out.initial_value) / out.exponent_integral;
    } else {
        out.minimal_constant = std::numeric_limits<double>::infinity();
    }
    return out;
}

SmallnessReport smallness_monitor(const Trajectory& trajectory,
                                  const CriterionSpec& spec, double epsilon) {
    AdmissibleExponents shape;
    switch (spec.kind) {
        case CriterionKind::kappa_beta:
            shape.form = CriterionForm::kappa_beta_smallness;
            shape.parameter = rational_approx(spec.parameter);
            break;
        case CriterionKind::kappa:
            shape.form = CriterionForm::kappa_smallness;
            break;
        case CriterionKind::weighted_kappa:
            shape.form = CriterionForm::weighted_smallness;
            shape.parameter = rational_approx(spec.parameter);
            break;
        case CriterionKind::eta:
            throw std::invalid_argument(
                "no smallness form exists for the eta criterion");
    }
    shape.gamma = rational_approx(spec.gamma);
    shape.alpha = std::isinf(spec.alpha) ? Rational::infinity()
                                         : rational_approx(spec.alpha);
    const Admissibility adm = check_exponents(shape);
    if (!adm.admissible) throw std::invalid_argument(adm.detail);

    const std::size_t ci = criterion_index(trajectory, spec);
    const std::vector<double> times = diagnostic_times(trajectory);
    if (times.size() < 2) {
        throw std::invalid_argument("need at least two diagnostic samples");
    }

    SmallnessReport out;
    out.epsilon = epsilon;
    out.window = TimeWindow{times.front(), times.back()};
    if (spec.region.kind == Region::Kind::cylinder) {
        const double begin = spec.region.top_time -
                             spec.region.radius * spec.region.radius;
        const double end = spec.region.top_time;
        if (end < times.front() - 1e-12 || begin > times.back() + 1e-12) {
            throw std::invalid_argument(
                "cylinder window lies outside the sampled interval");
        }
        out.window.begin = begin;
        out.window.end = end;
        if (begin < times.front() - 1e-12) {
            out.window.begin = times.front();
            out.clipped = true;
        }
        if (end > times.back() + 1e-12) {
            out.window.end = times.back();
            out.clipped = true;
        }
    }

    std::vector<double> series;
    series.reserve(times.size());
    for (const DiagnosticSample& d : trajectory.diagnostics) {
        series.push_back(d.criterion_norms[ci]);
    }
    out.value = mixed_norm(times, series, inf_exponent, out.window);
    out.small = out.value <= epsilon;
    return out;
}

namespace {

struct WeightTables {
    std::vector<double> b;
    std::array<std::vector<double>, 3> grad;
    std::vector<double> lap;
};

WeightTables weight_tables(const SpectralGrid& grid, const TestWeight& w) {
    if (w.sharpness < 1) {
        throw std::invalid_argument("test weight sharpness must be at least 1");
    }
    if (w.scale < 0.0) {
        throw std::invalid_argument("test weight must be nonnegative");
    }
    const int n = grid.n();
    std::array<std::vector<double>, 3> f, fp, fpp;
    for (int axis = 0; axis < 3; ++axis) {
        f[axis].resize(n);
        fp[axis].resize(n);
        fpp[axis].resize(n);
        for (int i = 0; i < n; ++i) {
            const double x = 2.0 * SpectralGrid::pi * i / n - w.center[axis];
            const double h = 0.5 * (1.0 + std::cos(x));
            const double hp = -0.5 * std::sin(x);
            const double hpp = -0.5 * std::cos(x);
            const int m = w.sharpness;
            const double hm1 = std::pow(h, m - 1);
            f[axis][i] = std::pow(h, m);
            fp[axis][i] = m * hm1 * hp;
            fpp[axis][i] = m * hm1 * hpp +
                           (m > 1 ? m * (m - 1) * std::pow(h, m - 2) * hp * hp
                                  : 0.0);
        }
    }
    WeightTables t;
    const std::size_t total = static_cast<std::size_t>(n) * n * n;
    t.b.resize(total);
    t.lap.resize(total);
    for (auto& g : t.grad) g.resize(total);
    std::size_t s = 0;
    for (int iz = 0; iz < n; ++iz) {
        for (int iy = 0; iy < n; ++iy) {
            for (int ix = 0; ix < n; ++ix, ++s) {
                const double fx = f[0][ix], fy = f[1][iy], fz = f[2][iz];
                t.b[s] = w.scale * fx * fy * fz;
                t.grad[0][s] = w.scale * fp[0][ix] * fy * fz;
                t.grad[1][s] = w.scale * fx * fp[1][iy] * fz;
                t.grad[2][s] = w.scale * fx * fy * fp[2][iz];
                t.lap[s] = w.scale * (fpp[0][ix] * fy * fz +
                                      fx * fpp[1][iy] * fz +
                                      fx * fy * fpp[2][iz]);
            }
        }
    }
    return t;
}

struct SampleTerms {
    double mass = 0.0;      // integral |v|^2 B
    double gradient = 0.0;  // integral |grad v|^2 B
    double diffusion = 0.0; // integral |v|^2 lap B
    double transport = 0.0; // integral (|v|^2 + 2p) v . grad B
};

SampleTerms sample_terms(const VectorField& v, const WeightTables& wt) {
    const SpectralGrid& g = v.grid();
    const double dv = std::pow(2.0 * SpectralGrid::pi / g.n(), 3);
    const ScalarField pressure = pressure_from_velocity(v);

    auto vx = v[0].physical(), vy = v[1].physical(), vz = v[2].physical();
    auto pp = pressure.physical();

    SampleTerms t;
    for (std::size_t s = 0; s < vx.size(); ++s) {
        const double vv = vx[s] * vx[s] + vy[s] * vy[s] + vz[s] * vz[s];
        t.mass += vv * wt.b[s];
        t.diffusion += vv * wt.lap[s];
        t.transport += (vv + 2.0 * pp[s]) *
                       (vx[s] * wt.grad[0][s] + vy[s] * wt.grad[1][s] +
                        vz[s] * wt.grad[2][s]);
    }
    for (int c = 0; c < 3; ++c) {
        const VectorField gc = gradient(v[c]);
        for (int d = 0; d < 3; ++d) {
            auto gd = gc[d].physical();
            for (std::size_t s = 0; s < gd.size(); ++s) {
                t.gradient += gd[s] * gd[s] * wt.b[s];
            }
        }
    }
    t.mass *= dv;
    t.gradient *= dv;
    t.diffusion *= dv;
    t.transport *= dv;
    return t;
}

LocalEnergyReport assemble_local_energy(const std::vector<double>& times,
                                        const std::vector<SampleTerms>& terms,
                                        TestWeight::Profile profile, double nu,
                                        double tolerance) {
    const double t0 = times.front();
    const double length = times.back() - t0;
    if (length <= 0.0) {
        throw std::invalid_argument("evaluation window has zero length");
    }
    auto g_of = [&](double t) {
        if (profile == TestWeight::Profile::constant) return 1.0;
        const double s = std::sin(SpectralGrid::pi * (t - t0) / length);
        return s * s;
    };
    auto gp_of = [&](double t) {
        if (profile == TestWeight::Profile::constant) return 0.0;
        return SpectralGrid::pi / length * std::sin(2.0 * SpectralGrid::pi * (t - t0) / length);
    };

    LocalEnergyReport out;
    out.tolerance = tolerance;
    out.times = times;
    const std::size_t count = times.size();
    out.lhs.resize(count);
    out.rhs.resize(count);
    out.residual.resize(count);

    std::vector<double> diss(count), source(count), timed(count), diff(count),
        trans(count);
    for (std::size_t j = 0; j < count; ++j) {
        const double g = g_of(times[j]);
        const double gp = gp_of(times[j]);
        diss[j] = 2.0 * nu * terms[j].gradient * g;
        timed[j] = terms[j].mass * gp;
        diff[j] = nu * terms[j].diffusion * g;
        trans[j] = terms[j].transport * g;
        source[j] = timed[j] + diff[j] + trans[j];
    }

    out.initial_term = terms[0].mass * g_of(times[0]);
    double diss_acc = 0.0, source_acc = 0.0, timed_acc = 0.0, diff_acc = 0.0,
           trans_acc = 0.0;
    for (std::size_t j = 0; j < count; ++j) {
        if (j > 0) {
            const double h = times[j] - times[j - 1];
            diss_acc += 0.5 * h * (diss[j - 1] + diss[j]);
            source_acc += 0.5 * h * (source[j - 1] + source[j]);
            timed_acc += 0.5 * h * (timed[j - 1] + timed[j]);
            diff_acc += 0.5 * h * (diff[j - 1] + diff[j]);
            trans_acc += 0.5 * h * (trans[j - 1] + trans[j]);
        }
        out.lhs[j] = terms[j].mass * g_of(times[j]) + diss_acc;
        out.rhs[j] = out.initial_term + source_acc;
        out.residual[j] = out.lhs[j] - out.rhs[j];
        out.max_abs_residual =
            std::max(out.max_abs_residual, std::abs(out.residual[j]));
    }
    out.dissipation_term = diss_acc;
    out.time_derivative_term = timed_acc;
    out.diffusion_term = diff_acc;
    out.transport_term = trans_acc;
    out.relative = out.dissipation_term > 0.0
                       ? out.max_abs_residual / out.dissipation_term
                       : out.max_abs_residual;
    out.within = out.relative <= tolerance;
    return out;
}

} // namespace

LocalEnergyReport local_energy_residual(const Trajectory& trajectory,
                                        const TestWeight& phi,
                                        double tolerance) {
    if (trajectory.snapshots.size() < 2) {
        throw std::invalid_argument("need at least two snapshots");
    }
    const WeightTables tables =
        weight_tables(trajectory.snapshots.front().velocity.grid(), phi);

    std::vector<double> times;
    std::vector<SampleTerms> terms;
    times.reserve(trajectory.snapshots.size());
    terms.reserve(trajectory.snapshots.size());
    for (const TrajectorySample& s : trajectory.snapshots) {
        if (!times.empty() && s.time <= times.back()) {
            throw std::invalid_argument("snapshot times must increase");
        }
        times.push_back(s.time);
        terms.push_back(sample_terms(s.velocity, tables));
    }
    return assemble_local_energy(times, terms, phi.profile, trajectory.nu,
                                 tolerance);
}

LocalEnergyReport local_energy_residual(const SolverConfig& config,
                                        const TestWeight& phi,
                                        double tolerance) {
    if (config.dt <= 0.0) throw std::invalid_argument("dt must be positive");
    const long steps = std::lround(config.end_time / config.dt);
    if (steps < 1 ||
        std::abs(steps * config.dt - config.end_time) > 1e-9 * config.end_time) {
        throw std::invalid_argument("end_time must be a multiple of dt");
    }

    const SpectralGrid grid(config.n);
    const WeightTables tables = weight_tables(grid, phi);
    VectorField v = make_initial(grid, config.initial);
    dealias_in_place(v);
    leray_project_in_place(v);
    const Stepper stepper(grid, config.dt, config.nu);
    const double dx = 2.0 * SpectralGrid::pi / config.n;

    std::vector<double> times;
    std::vector<SampleTerms> terms;
    times.reserve(steps + 1);
    terms.reserve(steps + 1);
    for (long i = 0;; ++i) {
        const double speed = max_velocity(v);
        if (speed > config.max_velocity_guard) {
            throw InstabilityError("velocity guard exceeded");
        }
        if (tail_energy_fraction(v) > config.tail_energy_limit) {
            throw InstabilityError("spectral tail indicates under-resolution");
        }
        times.push_back(double(i) * config.dt);
        terms.push_back(sample_terms(v, tables));
        if (i == steps) break;
        if (config.dt * speed / dx > config.cfl_limit) {
            throw InstabilityError("CFL limit exceeded");
        }
        v = stepper.step(v);
    }
    return assemble_local_energy(times, terms, phi.profile, config.nu,
                                 tolerance);
}

EstimateReport make_estimate_report(const Trajectory& trajectory, double beta,
                                    double gamma, double constant,
                                    double balance_tolerance) {
    EstimateReport out;
    out.beta = beta;
    out.gamma = gamma;
    const std::size_t bi = beta_index(trajectory, beta);
    const std::size_t ci = kappa_beta_series(trajectory, beta, gamma);

    out.times = diagnostic_times(trajectory);
    for (const DiagnosticSample& d : trajectory.diagnostics) {
        out.energy.push_back(d.energy[bi]);
        out.dissipation.push_back(d.dissipation[bi]);
        out.production.push_back(d.production[bi]);
        out.criterion_norm.push_back(d.criterion_norms[ci]);
    }
    const Rational alpha = young_time_exponent(rational_approx(gamma));
    out.alpha = alpha.value();
    out.mixed_norm_value =
        mixed_norm(out.times, out.criterion_norm, out.alpha,
                   TimeWindow{out.times.front(), out.times.back()});
    out.balance = energy_balance_residual(trajectory, beta, balance_tolerance);
    out.envelope = gronwall_envelope(trajectory, gamma, beta, constant);
    return out;
}

} // namespace regwatch
