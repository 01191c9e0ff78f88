#include "regwatch/spectral_ops.hpp"

#include <cmath>
#include <stdexcept>

namespace regwatch {

namespace {

// Odd-order derivatives drop the Nyquist frequency: with the +n/2 convention a
// factor i*k on that plane would break the conjugate symmetry of a real field.
inline int deriv_wavenumber(int k, int n) { return (k == n / 2) ? 0 : k; }

template <class Fn>
void for_each_mode(const SpectralGrid& g, Fn&& fn) {
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

ScalarField lambda_beta(const ScalarField& f, double beta) {
    if (beta < 0.0 || beta > 4.0)
        throw std::invalid_argument("lambda_beta: beta must lie in [0, 4]");
    const SpectralGrid& g = f.grid();
    ScalarField out(g);
    auto in = f.spectral();
    auto res = out.spectral_mut();
    const double half = 0.5 * beta;
    for_each_mode(g, [&](std::size_t s, int kx, int ky, int kz) {
        const double k2 = double(kx) * kx + double(ky) * ky + double(kz) * kz;
        res[s] = (k2 == 0.0) ? Complex(0.0) : in[s] * std::pow(k2, half);
    });
    return out;
}

VectorField lambda_beta(const VectorField& v, double beta) {
    VectorField out(v.grid());
    for (int c = 0; c < 3; ++c) out[c] = lambda_beta(v[c], beta);
    return out;
}

VectorField gradient(const ScalarField& f) {
    const SpectralGrid& g = f.grid();
    const int n = g.n();
    VectorField out(g);
    auto in = f.spectral();
    auto gx = out[0].spectral_mut();
    auto gy = out[1].spectral_mut();
    auto gz = out[2].spectral_mut();
    for_each_mode(g, [&](std::size_t s, int kx, int ky, int kz) {
        const Complex iv = Complex(0.0, 1.0) * in[s];
        gx[s] = double(deriv_wavenumber(kx, n)) * iv;
        gy[s] = double(deriv_wavenumber(ky, n)) * iv;
        gz[s] = double(deriv_wavenumber(kz, n)) * iv;
    });
    return out;
}

ScalarField divergence(const VectorField& v) {
    const SpectralGrid& g = v.grid();
    const int n = g.n();
    ScalarField out(g);
    auto vx = v[0].spectral();
    auto vy = v[1].spectral();
    auto vz = v[2].spectral();
    auto res = out.spectral_mut();
    for_each_mode(g, [&](std::size_t s, int kx, int ky, int kz) {
        res[s] = Complex(0.0, 1.0) * (double(deriv_wavenumber(kx, n)) * vx[s] +
                                      double(deriv_wavenumber(ky, n)) * vy[s] +
                                      double(deriv_wavenumber(kz, n)) * vz[s]);
    });
    return out;
}

VectorField curl(const VectorField& v) {
    const SpectralGrid& g = v.grid();
    const int n = g.n();
    VectorField out(g);
    auto vx = v[0].spectral();
    auto vy = v[1].spectral();
    auto vz = v[2].spectral();
    auto wx = out[0].spectral_mut();
    auto wy = out[1].spectral_mut();
    auto wz = out[2].spectral_mut();
    for_each_mode(g, [&](std::size_t s, int kx, int ky, int kz) {
        const double dkx = deriv_wavenumber(kx, n);
        const double dky = deriv_wavenumber(ky, n);
        const double dkz = deriv_wavenumber(kz, n);
        const Complex i(0.0, 1.0);
        wx[s] = i * (dky * vz[s] - dkz * vy[s]);
        wy[s] = i * (dkz * vx[s] - dkx * vz[s]);
        wz[s] = i * (dkx * vy[s] - dky * vx[s]);
    });
    return out;
}

ScalarField laplacian(const ScalarField& f) {
    const SpectralGrid& g = f.grid();
    ScalarField out(g);
    auto in = f.spectral();
    auto res = out.spectral_mut();
    for_each_mode(g, [&](std::size_t s, int kx, int ky, int kz) {
        const double k2 = double(kx) * kx + double(ky) * ky + double(kz) * kz;
        res[s] = -k2 * in[s];
    });
    return out;
}

VectorField laplacian(const VectorField& v) {
    VectorField out(v.grid());
    for (int c = 0; c < 3; ++c) out[c] = laplacian(v[c]);
    return out;
}

void leray_project_in_place(VectorField& v) {
    const SpectralGrid& g = v.grid();
    const int nh = g.n() / 2;
    auto vx = v[0].spectral_mut();
    auto vy = v[1].spectral_mut();
    auto vz = v[2].spectral_mut();
    for_each_mode(g, [&](std::size_t s, int kx, int ky, int kz) {
        // The k k^T multiplier is sign-odd in each factor, which has no
        // consistent value on the Nyquist planes of a real field; drop them.
        if (kx == nh || ky == nh || kz == nh) {
            vx[s] = vy[s] = vz[s] = Complex(0.0);
            return;
        }
        const double k2 = double(kx) * kx + double(ky) * ky + double(kz) * kz;
        if (k2 == 0.0) return;
        const Complex kdotv = (double(kx) * vx[s] + double(ky) * vy[s] + double(kz) * vz[s]) / k2;
        vx[s] -= double(kx) * kdotv;
        vy[s] -= double(ky) * kdotv;
        vz[s] -= double(kz) * kdotv;
    });
}

VectorField leray_project(const VectorField& v) {
    VectorField out = v;
    leray_project_in_place(out);
    return out;
}

void dealias_in_place(ScalarField& f) {
    const SpectralGrid& g = f.grid();
    auto spec = f.spectral_mut();
    for_each_mode(g, [&](std::size_t s, int kx, int ky, int kz) {
        if (!g.dealias_keep(kx, ky, kz)) spec[s] = Complex(0.0);
    });
}

void dealias_in_place(VectorField& v) {
    for (int c = 0; c < 3; ++c) dealias_in_place(v[c]);
}

ScalarField dealias(const ScalarField& f) {
    ScalarField out = f;
    dealias_in_place(out);
    return out;
}

VectorField dealias(const VectorField& v) {
    VectorField out = v;
    dealias_in_place(out);
    return out;
}

bool is_band_limited(const VectorField& v, double tol) {
    const SpectralGrid& g = v.grid();
    double inside = 0.0, outside = 0.0;
    for (int c = 0; c < 3; ++c) {
        auto spec = v[c].spectral();
        for_each_mode(g, [&](std::size_t s, int kx, int ky, int kz) {
            const double mag = std::abs(spec[s]);
            if (g.dealias_keep(kx, ky, kz))
                inside = std::max(inside, mag);
            else
                outside = std::max(outside, mag);
        });
    }
    return outside <= tol * std::max(inside, outside);
}

VectorField cross(const VectorField& a, const VectorField& b) {
    require_same_grid(a.grid(), b.grid());
    VectorField out(a.grid());
    auto ax = a[0].physical(), ay = a[1].physical(), az = a[2].physical();
    auto bx = b[0].physical(), by = b[1].physical(), bz = b[2].physical();
    auto cx = out[0].physical_mut();
    auto cy = out[1].physical_mut();
    auto cz = out[2].physical_mut();
    const std::size_t np = a.grid().physical_size();
    for (std::size_t i = 0; i < np; ++i) {
        cx[i] = ay[i] * bz[i] - az[i] * by[i];
        cy[i] = az[i] * bx[i] - ax[i] * bz[i];
        cz[i] = ax[i] * by[i] - ay[i] * bx[i];
    }
    return out;
}

} // namespace regwatch
