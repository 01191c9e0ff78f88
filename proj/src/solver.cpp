#include "regwatch/solver.hpp"

#include <cmath>

#include "regwatch/norms.hpp"
#include "regwatch/spectral_ops.hpp"

namespace regwatch {

namespace {

// Same as the public entry point minus the input masking; callers guarantee
// band-limited input, which makes the product's low band alias-free.
VectorField rotational_term(const VectorField& v) {
    VectorField out = cross(v, curl(v));
    dealias_in_place(out);
    leray_project_in_place(out);
    return out;
}

template <class Fn>
void for_each_spectral(const SpectralGrid& g, Fn&& fn) {
    const int n = g.n();
    for (int iz = 0; iz < n; ++iz) {
        const int kz = g.wavenumber(iz);
        for (int iy = 0; iy < n; ++iy) {
            const int ky = g.wavenumber(iy);
            std::size_t s = g.spectral_index(0, iy, iz);
            for (int kx = 0; kx < g.nx_half(); ++kx, ++s) fn(s, kx, ky, kz);
        }
    }
}

} // namespace

VectorField nonlinear_rotational(const VectorField& v) {
    return rotational_term(dealias(v));
}

double max_velocity(const VectorField& v) {
    auto x = v[0].physical(), y = v[1].physical(), z = v[2].physical();
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        m = std::max(m, x[i] * x[i] + y[i] * y[i] + z[i] * z[i]);
    return std::sqrt(m);
}

double tail_energy_fraction(const VectorField& v) {
    const SpectralGrid& g = v.grid();
    const int band = 2 * g.dealias_cutoff() / 3;
    double total = 0.0, tail = 0.0;
    for (int c = 0; c < 3; ++c) {
        auto spec = v[c].spectral();
        for_each_spectral(g, [&](std::size_t s, int kx, int ky, int kz) {
            const double e = g.spectral_weight(kx) * std::norm(spec[s]);
            total += e;
            if (std::max({std::abs(kx), std::abs(ky), std::abs(kz)}) > band) tail += e;
        });
    }
    return total > 0.0 ? tail / total : 0.0;
}

EnergyTriple energy_diagnostics(const VectorField& v, const VectorField& nonlinear, double beta) {
    const SpectralGrid& g = v.grid();
    require_same_grid(g, nonlinear.grid());
    const double half = 0.5 * beta;
    double e = 0.0, d = 0.0, t = 0.0;
    for (int c = 0; c < 3; ++c) {
        auto vs = v[c].spectral();
        auto ns = nonlinear[c].spectral();
        for_each_spectral(g, [&](std::size_t s, int kx, int ky, int kz) {
            const double k2 = double(kx) * kx + double(ky) * ky + double(kz) * kz;
            if (k2 == 0.0) return;
            const double w = g.spectral_weight(kx);
            const double kb = std::pow(k2, half);
            const double vv = std::norm(vs[s]);
            e += w * kb * vv;
            d += w * k2 * kb * vv;
            t += w * kb * (vs[s].real() * ns[s].real() + vs[s].imag() * ns[s].imag());
        });
    }
    const double vol = g.volume();
    return EnergyTriple{0.5 * vol * e, vol * d, vol * t};
}

Stepper::Stepper(const SpectralGrid& grid, double dt, double nu)
    : grid_(grid), dt_(dt), nu_(nu), half_(grid.spectral_size()), full_(grid.spectral_size()) {
    if (!(dt > 0.0)) throw std::invalid_argument("Stepper: dt must be > 0");
    if (!(nu >= 0.0)) throw std::invalid_argument("Stepper: nu must be >= 0");
    for_each_spectral(grid_, [&](std::size_t s, int kx, int ky, int kz) {
        const double k2 = double(kx) * kx + double(ky) * ky + double(kz) * kz;
        const double e = std::exp(-nu * k2 * dt / 2.0);
        half_[s] = e;
        full_[s] = e * e;
    });
}

VectorField Stepper::step(const VectorField& v) const {
    return step(v, rotational_term(v));
}

VectorField Stepper::step(const VectorField& v, const VectorField& n1) const {
    require_same_grid(grid_, v.grid());
    const std::size_t ns = grid_.spectral_size();
    const double h = dt_;

    VectorField va(grid_), vb(grid_), out(grid_);
    for (int c = 0; c < 3; ++c) {
        auto vs = v[c].spectral();
        auto n1s = n1[c].spectral();
        auto as = va[c].spectral_mut();
        for (std::size_t s = 0; s < ns; ++s) as[s] = half_[s] * (vs[s] + (h / 2.0) * n1s[s]);
    }
    VectorField n2 = rotational_term(va);

    for (int c = 0; c < 3; ++c) {
        auto vs = v[c].spectral();
        auto n2s = n2[c].spectral();
        auto bs = vb[c].spectral_mut();
        for (std::size_t s = 0; s < ns; ++s) bs[s] = half_[s] * vs[s] + (h / 2.0) * n2s[s];
    }
    VectorField n3 = rotational_term(vb);

    VectorField vc(grid_);
    for (int c = 0; c < 3; ++c) {
        auto vs = v[c].spectral();
        auto n3s = n3[c].spectral();
        auto cs = vc[c].spectral_mut();
        for (std::size_t s = 0; s < ns; ++s) cs[s] = full_[s] * vs[s] + h * half_[s] * n3s[s];
    }
    VectorField n4 = rotational_term(vc);

    for (int c = 0; c < 3; ++c) {
        auto vs = v[c].spectral();
        auto n1s = n1[c].spectral();
        auto n2s = n2[c].spectral();
        auto n3s = n3[c].spectral();
        auto n4s = n4[c].spectral();
        auto os = out[c].spectral_mut();
        for (std::size_t s = 0; s < ns; ++s)
            os[s] = full_[s] * vs[s] +
                    (h / 6.0) * (full_[s] * n1s[s] + 2.0 * half_[s] * (n2s[s] + n3s[s]) + n4s[s]);
    }
    return out;
}

Trajectory simulate(const SolverConfig& config) {
    if (!(config.dt > 0.0)) throw std::invalid_argument("simulate: dt must be > 0");
    if (!(config.end_time > 0.0)) throw std::invalid_argument("simulate: end_time must be > 0");
    if (config.snapshot_stride < 1 || config.diagnostic_stride < 1)
        throw std::invalid_argument("simulate: strides must be >= 1");
    if (!(config.cfl_limit > 0.0)) throw std::invalid_argument("simulate: cfl_limit must be > 0");

    SpectralGrid grid(config.n);
    VectorField v = make_initial(grid, config.initial);
    dealias_in_place(v);
    leray_project_in_place(v);

    const long steps = std::lround(config.end_time / config.dt);
    if (steps < 1) throw std::invalid_argument("simulate: end_time shorter than one step");

    Stepper stepper(grid, config.dt, config.nu);

    std::vector<std::vector<std::uint8_t>> masks(config.criteria.size());
    for (std::size_t i = 0; i < config.criteria.size(); ++i) {
        const Region& r = config.criteria[i].region;
        if (r.kind == Region::Kind::cylinder) masks[i] = cylinder_mask(grid, r.center, r.radius);
    }

    Trajectory traj;
    traj.nu = config.nu;
    traj.betas = config.betas;
    traj.criteria = config.criteria;

    for (long i = 0;; ++i) {
        const double t = double(i) * config.dt;
        const bool last = (i == steps);

        const double vmax = max_velocity(v);
        const double tail = tail_energy_fraction(v);

        if (vmax > config.max_velocity_guard)
            throw InstabilityError("velocity guard exceeded at t = " + std::to_string(t));
        if (tail > config.tail_energy_limit)
            throw InstabilityError("resolution lost: tail energy fraction " +
                                   std::to_string(tail) + " at t = " + std::to_string(t));

        VectorField n1 = rotational_term(v);

        if (i % config.diagnostic_stride == 0 || last) {
            DiagnosticSample sample;
            sample.time = t;
            sample.max_velocity = vmax;
            sample.tail_fraction = tail;
            for (double beta : config.betas) {
                const EnergyTriple e = energy_diagnostics(v, n1, beta);
                sample.energy.push_back(e.energy);
                sample.dissipation.push_back(e.dissipation);
                sample.production.push_back(e.production);
            }
            for (std::size_t c = 0; c < config.criteria.size(); ++c) {
                const CriterionSpec& spec = config.criteria[c];
                CriterionField f = criterion_field(v, spec);
                sample.criterion_norms.push_back(
                    masks[c].empty() ? spatial_norm(f.values, spec.gamma)
                                     : spatial_norm(f.values, spec.gamma, masks[c]));
            }
            traj.diagnostics.push_back(std::move(sample));
        }

        if (i % config.snapshot_stride == 0 || last)
            traj.snapshots.push_back(TrajectorySample{t, v});

        if (last) break;

        const double cfl = config.dt * vmax / grid.dx();
        if (cfl > config.cfl_limit)
            throw InstabilityError("CFL violation: " + std::to_string(cfl) + " at t = " +
                                   std::to_string(t));

        v = stepper.step(v, n1);
    }
    return traj;
}

ScalarField pressure_from_velocity(const VectorField& v) {
    const SpectralGrid& g = v.grid();
    VectorField w = cross(v, curl(v));
    ScalarField divw = divergence(w);

    // Bernoulli head H = p + |v|^2/2 from laplace(H) = div(v x w).
    ScalarField head(g);
    auto src = divw.spectral();
    auto dst = head.spectral_mut();
    for_each_spectral(g, [&](std::size_t s, int kx, int ky, int kz) {
        const double k2 = double(kx) * kx + double(ky) * ky + double(kz) * kz;
        dst[s] = (k2 == 0.0) ? Complex(0.0) : -src[s] / k2;
    });

    ScalarField p(g);
    auto hp = head.physical();
    auto vx = v[0].physical(), vy = v[1].physical(), vz = v[2].physical();
    auto pp = p.physical_mut();
    const std::size_t np = g.physical_size();
    double mean_q = 0.0;
    for (std::size_t i = 0; i < np; ++i)
        mean_q += 0.5 * (vx[i] * vx[i] + vy[i] * vy[i] + vz[i] * vz[i]);
    mean_q /= double(np);
    for (std::size_t i = 0; i < np; ++i)
        pp[i] = hp[i] - 0.5 * (vx[i] * vx[i] + vy[i] * vy[i] + vz[i] * vz[i]) + mean_q;
    return p;
}

} // namespace regwatch
