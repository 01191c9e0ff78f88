#include "regwatch/flows.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "regwatch/norms.hpp"

namespace regwatch {

namespace {

void fill_physical(ScalarField& f, double (*fn)(double, double, double, double, double, double),
                   double A, double B, double C) {
    const SpectralGrid& g = f.grid();
    auto p = f.physical_mut();
    const int n = g.n();
    for (int iz = 0; iz < n; ++iz)
        for (int iy = 0; iy < n; ++iy)
            for (int ix = 0; ix < n; ++ix)
                p[g.physical_index(ix, iy, iz)] =
                    fn(g.point(ix), g.point(iy), g.point(iz), A, B, C);
}

} // namespace

VectorField initial_taylor_green(const SpectralGrid& grid) {
    VectorField v(grid);
    fill_physical(v[0], [](double x, double y, double z, double, double, double) {
        return std::sin(x) * std::cos(y) * std::cos(z);
    }, 0, 0, 0);
    fill_physical(v[1], [](double x, double y, double z, double, double, double) {
        return -std::cos(x) * std::sin(y) * std::cos(z);
    }, 0, 0, 0);
    v[2].fill(0.0);
    return v;
}

VectorField initial_abc(const SpectralGrid& grid, double A, double B, double C) {
    VectorField v(grid);
    fill_physical(v[0], [](double, double y, double z, double A, double, double C) {
        return A * std::sin(z) + C * std::cos(y);
    }, A, B, C);
    fill_physical(v[1], [](double x, double, double z, double A, double B, double) {
        return B * std::sin(x) + A * std::cos(z);
    }, A, B, C);
    fill_physical(v[2], [](double x, double y, double, double, double B, double C) {
        return C * std::sin(y) + B * std::cos(x);
    }, A, B, C);
    return v;
}

VectorField initial_random_divfree(const SpectralGrid& grid, double slope, std::uint64_t seed,
                                   double amplitude) {
    if (!(amplitude >= 0.0))
        throw std::invalid_argument("initial_random_divfree: amplitude must be >= 0");

    VectorField v(grid);
    auto vx = v[0].spectral_mut();
    auto vy = v[1].spectral_mut();
    auto vz = v[2].spectral_mut();
    for (std::size_t s = 0; s < vx.size(); ++s) vx[s] = vy[s] = vz[s] = Complex(0.0);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    const int n = grid.n();
    const int kd = grid.dealias_cutoff();

    auto assign = [&](int kx, int iy, int iz) {
        const double ky = grid.wavenumber(iy), kz = grid.wavenumber(iz);
        const double k2 = double(kx) * kx + ky * ky + kz * kz;
        if (k2 < 4.0 || k2 > double(kd) * kd) return;
        Complex c[3];
        for (auto& e : c) e = Complex(dist(rng), dist(rng));
        // Tangential projection makes the mode divergence-free.
        const Complex kdotc = (double(kx) * c[0] + ky * c[1] + kz * c[2]) / k2;
        c[0] -= double(kx) * kdotc;
        c[1] -= ky * kdotc;
        c[2] -= kz * kdotc;
        // Per-mode magnitude |k|^((slope-2)/2) gives shell energy ~ k^slope.
        const double scale = std::pow(k2, (slope - 2.0) / 4.0);
        const std::size_t s = grid.spectral_index(kx, iy, iz);
        vx[s] = scale * c[0];
        vy[s] = scale * c[1];
        vz[s] = scale * c[2];
    };

    // Free modes: kx > 0 (their conjugates are implicit in the half-spectrum).
    for (int iz = 0; iz < n; ++iz)
        for (int iy = 0; iy < n; ++iy)
            for (int kx = 1; kx < grid.nx_half(); ++kx) assign(kx, iy, iz);

    // The kx = 0 plane pairs with itself; draw one representative per pair and
    // mirror the conjugate explicitly.
    for (int iz = 0; iz < n; ++iz)
        for (int iy = 0; iy < n; ++iy) {
            const int ky = grid.wavenumber(iy), kz = grid.wavenumber(iz);
            const bool canonical = kz > 0 || (kz == 0 && ky > 0);
            if (!canonical) continue;
            assign(0, iy, iz);
            const std::size_t from = grid.spectral_index(0, iy, iz);
            const std::size_t to = grid.spectral_index(0, (n - iy) % n, (n - iz) % n);
            vx[to] = std::conj(vx[from]);
            vy[to] = std::conj(vy[from]);
            vz[to] = std::conj(vz[from]);
        }

    const double cur = spatial_norm(v, 2.0);
    if (cur > 0.0 && amplitude > 0.0) {
        const double factor = amplitude / cur;
        auto sx = v[0].spectral_mut();
        auto sy = v[1].spectral_mut();
        auto sz = v[2].spectral_mut();
        for (std::size_t s = 0; s < sx.size(); ++s) {
            sx[s] *= factor;
            sy[s] *= factor;
            sz[s] *= factor;
        }
    }
    return v;
}

VectorField make_initial(const SpectralGrid& grid, const InitialCondition& ic) {
    switch (ic.kind) {
        case InitialCondition::Kind::taylor_green:
            return initial_taylor_green(grid);
        case InitialCondition::Kind::abc:
            return initial_abc(grid, ic.A, ic.B, ic.C);
        case InitialCondition::Kind::random_divfree:
            return initial_random_divfree(grid, ic.slope, ic.seed, ic.amplitude);
        case InitialCondition::Kind::zero: {
            VectorField v(grid);
            for (int c = 0; c < 3; ++c) v[c].fill(0.0);
            return v;
        }
    }
    throw std::logic_error("make_initial: unknown kind");
}

} // namespace regwatch
