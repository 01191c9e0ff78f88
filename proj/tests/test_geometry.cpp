#include <doctest.h>

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "regwatch/geometry.hpp"
#include "regwatch/norms.hpp"
#include "regwatch/spectral_ops.hpp"
#include "test_helpers.hpp"

using namespace regwatch;
using namespace regwatch::testing;

namespace {

constexpr double pi = SpectralGrid::pi;

VectorField taylor_green(const SpectralGrid& g) {
    VectorField v(g);
    fill_from(v[0], [](double x, double y, double z) { return std::sin(x) * std::cos(y) * std::cos(z); });
    fill_from(v[1], [](double x, double y, double z) { return -std::cos(x) * std::sin(y) * std::cos(z); });
    v[2].fill(0.0);
    return v;
}

VectorField abc_flow(const SpectralGrid& g, double A, double B, double C) {
    VectorField v(g);
    fill_from(v[0], [&](double, double y, double z) { return A * std::sin(z) + C * std::cos(y); });
    fill_from(v[1], [&](double x, double, double z) { return B * std::sin(x) + A * std::cos(z); });
    fill_from(v[2], [&](double x, double y, double) { return C * std::sin(y) + B * std::cos(x); });
    return v;
}

// Reference path: full-lattice DFT by direct summation, derivative fields
// evaluated pointwise from the mode sums, everything independent of the FFT
// and multiplier code under test.
struct SlowSpectrum {
    int n;
    std::vector<std::array<Complex, 3>> coeff; // full lattice, index (ix, iy, iz) x-fastest

    static int wavenum(int idx, int n) { return idx <= n / 2 ? idx : idx - n; }

    explicit SlowSpectrum(const VectorField& v) : n(v.grid().n()), coeff(v.grid().physical_size()) {
        const SpectralGrid& g = v.grid();
        auto vx = v[0].physical(), vy = v[1].physical(), vz = v[2].physical();
        for (int kz = 0; kz < n; ++kz)
            for (int ky = 0; ky < n; ++ky)
                for (int kx = 0; kx < n; ++kx) {
                    Complex cx(0), cy(0), cz(0);
                    for (int iz = 0; iz < n; ++iz)
                        for (int iy = 0; iy < n; ++iy)
                            for (int ix = 0; ix < n; ++ix) {
                                const double phase =
                                    -2.0 * pi * (double(kx) * ix + double(ky) * iy + double(kz) * iz) / n;
                                const Complex e = std::polar(1.0, phase);
                                const std::size_t p = g.physical_index(ix, iy, iz);
                                cx += vx[p] * e;
                                cy += vy[p] * e;
                                cz += vz[p] * e;
                            }
                    const std::size_t s = g.physical_index(kx, ky, kz);
                    const double scale = 1.0 / (double(n) * n * n);
                    coeff[s] = {cx * scale, cy * scale, cz * scale};
                }
    }

    // Evaluate sum_k m(k) c_k e^{ik.x} at a grid point for a per-mode 3x3 action.
    template <class ModeMap>
    std::array<double, 3> evaluate(const SpectralGrid& g, int ix, int iy, int iz, ModeMap&& map) const {
        Complex acc[3] = {0, 0, 0};
        for (int kzi = 0; kzi < n; ++kzi)
            for (int kyi = 0; kyi < n; ++kyi)
                for (int kxi = 0; kxi < n; ++kxi) {
                    const int kx = wavenum(kxi, n), ky = wavenum(kyi, n), kz = wavenum(kzi, n);
                    const auto& c = coeff[g.physical_index(kxi, kyi, kzi)];
                    const std::array<Complex, 3> mc = map(kx, ky, kz, c);
                    const double phase = 2.0 * pi * (double(kx) * ix + double(ky) * iy + double(kz) * iz) / n;
                    const Complex e = std::polar(1.0, phase);
                    for (int d = 0; d < 3; ++d) acc[d] += mc[d] * e;
                }
        return {acc[0].real(), acc[1].real(), acc[2].real()};
    }
};

std::array<double, 3> unit_or_zero(const std::array<double, 3>& u, double cutoff) {
    const double m = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
    if (m <= cutoff || m == 0.0) return {0, 0, 0};
    return {u[0] / m, u[1] / m, u[2] / m};
}

double triple(const std::array<double, 3>& a, const std::array<double, 3>& b,
              const std::array<double, 3>& c) {
    const double tx = a[1] * b[2] - a[2] * b[1];
    const double ty = a[2] * b[0] - a[0] * b[2];
    const double tz = a[0] * b[1] - a[1] * b[0];
    return tx * c[0] + ty * c[1] + tz * c[2];
}

double mag3(const std::array<double, 3>& u) {
    return std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
}

} // namespace

TEST_CASE("direction fields carry the zero convention") {
    SpectralGrid g(16);

    VectorField u(g);
    u[0].fill(2.0);
    u[1].fill(0.0);
    u[2].fill(0.0);
    VectorField d = direction(u);
    CHECK(max_abs_diff(d[0].physical(), make_scalar(g, [](double, double, double) { return 1.0; }).physical()) < 1e-14);
    CHECK(max_abs(d[1].physical()) == 0.0);

    VectorField zero(g);
    for (int c = 0; c < 3; ++c) zero[c].fill(0.0);
    VectorField dz = direction(zero);
    for (int c = 0; c < 3; ++c) CHECK(max_abs(dz[c].physical()) == 0.0);

    // Unit magnitude off the floor set.
    std::mt19937_64 rng(3);
    VectorField r = random_vector(g, rng);
    VectorField dr = direction(r);
    auto dx = dr[0].physical(), dy = dr[1].physical(), dzp = dr[2].physical();
    for (std::size_t i = 0; i < dx.size(); ++i) {
        const double m = std::sqrt(dx[i] * dx[i] + dy[i] * dy[i] + dzp[i] * dzp[i]);
        if (m != 0.0) CHECK(std::abs(m - 1.0) < 1e-12);
    }

    // Taylor-Green vorticity vanishes at (pi/2, 0, 0); nearby generic points match omega/|omega|.
    SpectralGrid g16(16);
    VectorField tg = taylor_green(g16);
    VectorField omega = curl(tg);
    VectorField dom = direction(omega);
    const std::size_t at_zero = g16.physical_index(4, 0, 0);
    CHECK(std::abs(dom[0].physical()[at_zero]) == 0.0);
    CHECK(std::abs(dom[1].physical()[at_zero]) == 0.0);
    CHECK(std::abs(dom[2].physical()[at_zero]) == 0.0);

    const int ix = 2, iy = 3, iz = 5;
    const double x = g16.point(ix), y = g16.point(iy), z = g16.point(iz);
    const std::array<double, 3> w = {-std::cos(x) * std::sin(y) * std::sin(z),
                                     -std::sin(x) * std::cos(y) * std::sin(z),
                                     2.0 * std::sin(x) * std::sin(y) * std::cos(z)};
    const auto wd = unit_or_zero(w, 0.0);
    const std::size_t p = g16.physical_index(ix, iy, iz);
    CHECK(std::abs(dom[0].physical()[p] - wd[0]) < 1e-10);
    CHECK(std::abs(dom[1].physical()[p] - wd[1]) < 1e-10);
    CHECK(std::abs(dom[2].physical()[p] - wd[2]) < 1e-10);
}

TEST_CASE("criterion fields vanish on Beltrami flows") {
    SpectralGrid g(16);
    VectorField abc = abc_flow(g, 1.0, 0.9, 1.1);
    for (double beta : {1.0, 1.5, 2.0})
        CHECK(spatial_norm(kappa_beta_field(abc, beta).values, inf_exponent) <= 1e-12);
    CHECK(spatial_norm(kappa_field(abc).values, inf_exponent) <= 1e-12);
    CHECK(spatial_norm(eta_field(abc).values, inf_exponent) <= 1e-12);
    for (double b : {0.5, 1.0, 2.0})
        CHECK(spatial_norm(weighted_kappa_b(abc, b).values, inf_exponent) <= 1e-12);
}

TEST_CASE("Taylor-Green criterion fields against closed forms") {
    // Every Fourier mode of the Taylor-Green field sits on the |k|^2 = 3 shell,
    // so Lambda^beta v and curl(omega) are multiples of v and all triples vanish.
    SpectralGrid g(16);
    VectorField tg = taylor_green(g);

    VectorField cc = curl(curl(tg));
    VectorField three(g);
    for (int c = 0; c < 3; ++c) {
        auto src = tg[c].physical();
        auto dst = three[c].physical_mut();
        for (std::size_t i = 0; i < src.size(); ++i) dst[i] = 3.0 * src[i];
    }
    CHECK(max_abs_diff(cc, three) < 1e-11);

    CHECK(spatial_norm(kappa_beta_field(tg, 2.0).values, inf_exponent) <= 1e-12);
    CHECK(spatial_norm(eta_field(tg).values, inf_exponent) <= 1e-12);

    // Spot checks at fixed grid points with all constituents from closed forms.
    const int pts[5][3] = {{1, 2, 3}, {5, 1, 7}, {3, 3, 1}, {2, 6, 4}, {7, 7, 2}};
    CriterionField k2 = kappa_beta_field(tg, 2.0);
    for (auto& q : pts) {
        const double x = g.point(q[0]), y = g.point(q[1]), z = g.point(q[2]);
        const std::array<double, 3> v = {std::sin(x) * std::cos(y) * std::cos(z),
                                         -std::cos(x) * std::sin(y) * std::cos(z), 0.0};
        const std::array<double, 3> w = {-std::cos(x) * std::sin(y) * std::sin(z),
                                         -std::sin(x) * std::cos(y) * std::sin(z),
                                         2.0 * std::sin(x) * std::sin(y) * std::cos(z)};
        const std::array<double, 3> lv = {3.0 * v[0], 3.0 * v[1], 3.0 * v[2]};
        const double want = std::max(triple(v, unit_or_zero(w, 0.0), unit_or_zero(lv, 0.0)), 0.0);
        const double got = k2.values.physical()[g.physical_index(q[0], q[1], q[2])];
        CHECK(std::abs(got - want) < 1e-10);
    }
}

TEST_CASE("criterion fields match a direct-summation reference") {
    SpectralGrid g(8);
    std::mt19937_64 rng(2718);
    VectorField v = leray_project(dealias(random_vector(g, rng)));

    SlowSpectrum slow(v);
    const int n = g.n();
    const std::size_t np = g.physical_size();

    std::vector<std::array<double, 3>> vv(np), ww(np), cw(np), lv15(np);
    for (int iz = 0; iz < n; ++iz)
        for (int iy = 0; iy < n; ++iy)
            for (int ix = 0; ix < n; ++ix) {
                const std::size_t p = g.physical_index(ix, iy, iz);
                vv[p] = slow.evaluate(g, ix, iy, iz,
                                      [](int, int, int, const std::array<Complex, 3>& c) { return c; });
                ww[p] = slow.evaluate(g, ix, iy, iz,
                                      [](int kx, int ky, int kz, const std::array<Complex, 3>& c) {
                                          const Complex i(0, 1);
                                          return std::array<Complex, 3>{
                                              i * (double(ky) * c[2] - double(kz) * c[1]),
                                              i * (double(kz) * c[0] - double(kx) * c[2]),
                                              i * (double(kx) * c[1] - double(ky) * c[0])};
                                      });
                cw[p] = slow.evaluate(g, ix, iy, iz,
                                      [](int kx, int ky, int kz, const std::array<Complex, 3>& c) {
                                          // curl curl = k x (k x c) with the i^2 sign folded in.
                                          const Complex kc_x = double(ky) * c[2] - double(kz) * c[1];
                                          const Complex kc_y = double(kz) * c[0] - double(kx) * c[2];
                                          const Complex kc_z = double(kx) * c[1] - double(ky) * c[0];
                                          return std::array<Complex, 3>{
                                              -(double(ky) * kc_z - double(kz) * kc_y),
                                              -(double(kz) * kc_x - double(kx) * kc_z),
                                              -(double(kx) * kc_y - double(ky) * kc_x)};
                                      });
                lv15[p] = slow.evaluate(g, ix, iy, iz,
                                        [](int kx, int ky, int kz, const std::array<Complex, 3>& c) {
                                            const double k = std::sqrt(double(kx) * kx + double(ky) * ky +
                                                                       double(kz) * kz);
                                            const double m = std::pow(k, 1.5);
                                            return std::array<Complex, 3>{m * c[0], m * c[1], m * c[2]};
                                        });
            }

    double vmax = 0, wmax = 0, cmax = 0, lmax = 0;
    for (std::size_t p = 0; p < np; ++p) {
        vmax = std::max(vmax, mag3(vv[p]));
        wmax = std::max(wmax, mag3(ww[p]));
        cmax = std::max(cmax, mag3(cw[p]));
        lmax = std::max(lmax, mag3(lv15[p]));
    }
    const double floor = default_direction_floor;

    CriterionField k15 = kappa_beta_field(v, 1.5);
    CriterionField kap = kappa_field(v);
    CriterionField eta = eta_field(v);
    CriterionField wb = weighted_kappa_b(v, 0.5);

    double dk = 0, dkap = 0, deta = 0, dwb = 0;
    for (std::size_t p = 0; p < np; ++p) {
        const double want_k15 =
            std::max(triple(vv[p], unit_or_zero(ww[p], floor * wmax), unit_or_zero(lv15[p], floor * lmax)), 0.0);
        const double want_kap =
            std::max(triple(vv[p], unit_or_zero(ww[p], floor * wmax), unit_or_zero(cw[p], floor * cmax)), 0.0);
        const double want_eta =
            std::max(triple(unit_or_zero(vv[p], floor * vmax), ww[p], unit_or_zero(cw[p], floor * cmax)), 0.0);
        const double want_wb =
            std::pow(mag3(vv[p]), 0.5) *
            std::max(triple(unit_or_zero(vv[p], floor * vmax), unit_or_zero(ww[p], floor * wmax),
                            unit_or_zero(cw[p], floor * cmax)),
                     0.0);
        dk = std::max(dk, std::abs(k15.values.physical()[p] - want_k15));
        dkap = std::max(dkap, std::abs(kap.values.physical()[p] - want_kap));
        deta = std::max(deta, std::abs(eta.values.physical()[p] - want_eta));
        dwb = std::max(dwb, std::abs(wb.values.physical()[p] - want_wb));
    }
    CHECK(dk < 1e-9);
    CHECK(dkap < 1e-9);
    CHECK(deta < 1e-9);
    CHECK(dwb < 1e-9);
}

TEST_CASE("kappa agrees with kappa_beta at beta = 2") {
    SpectralGrid g(16);
    std::mt19937_64 rng(11);
    VectorField v = leray_project(random_vector(g, rng));
    CriterionField a = kappa_field(v);
    CriterionField b = kappa_beta_field(v, 2.0);
    CHECK(max_abs_diff(a.values, b.values) <= 1e-10);
}

TEST_CASE("weighted criterion at b = 1 reduces to kappa off the floor set") {
    SpectralGrid g(16);
    std::mt19937_64 rng(13);
    VectorField v = leray_project(random_vector(g, rng));
    CriterionField kb = weighted_kappa_b(v, 1.0);
    CriterionField k = kappa_field(v);

    auto vx = v[0].physical(), vy = v[1].physical(), vz = v[2].physical();
    double vmax = 0.0;
    for (std::size_t i = 0; i < vx.size(); ++i)
        vmax = std::max(vmax, std::sqrt(vx[i] * vx[i] + vy[i] * vy[i] + vz[i] * vz[i]));

    auto a = kb.values.physical();
    auto b = k.values.physical();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double mag = std::sqrt(vx[i] * vx[i] + vy[i] * vy[i] + vz[i] * vz[i]);
        if (mag > 10.0 * default_direction_floor * vmax)
            CHECK(std::abs(a[i] - b[i]) <= 1e-12 * std::max(1.0, std::abs(b[i])));
    }
}

TEST_CASE("pointwise bounds and scaling") {
    SpectralGrid g(16);
    std::mt19937_64 rng(17);
    VectorField v = leray_project(random_vector(g, rng));
    VectorField omega = curl(v);

    CriterionField k1 = kappa_beta_field(v, 1.0);
    CriterionField et = eta_field(v);
    CriterionField kb = weighted_kappa_b(v, 0.5);

    auto vx = v[0].physical(), vy = v[1].physical(), vz = v[2].physical();
    auto ox = omega[0].physical(), oy = omega[1].physical(), oz = omega[2].physical();
    auto a = k1.values.physical();
    auto b = et.values.physical();
    auto c = kb.values.physical();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double vm = std::sqrt(vx[i] * vx[i] + vy[i] * vy[i] + vz[i] * vz[i]);
        const double om = std::sqrt(ox[i] * ox[i] + oy[i] * oy[i] + oz[i] * oz[i]);
        CHECK(a[i] >= 0.0);
        CHECK(a[i] <= vm * (1.0 + 1e-12) + 1e-14);
        CHECK(b[i] <= om * (1.0 + 1e-12) + 1e-14);
        CHECK(c[i] <= std::pow(vm, 0.5) * (1.0 + 1e-12) + 1e-14);
    }

    // Directions are scale-invariant, the bare v factor is linear.
    VectorField v2(g);
    for (int cc = 0; cc < 3; ++cc) {
        auto src = v[cc].physical();
        auto dst = v2[cc].physical_mut();
        for (std::size_t i = 0; i < src.size(); ++i) dst[i] = 2.5 * src[i];
    }
    CriterionField k1s = kappa_beta_field(v2, 1.0);
    auto s = k1s.values.physical();
    for (std::size_t i = 0; i < s.size(); ++i)
        CHECK(std::abs(s[i] - 2.5 * a[i]) <= 1e-11 * std::max(1.0, std::abs(s[i])));
}

TEST_CASE("criterion fields commute with lattice rotations") {
    SpectralGrid g(16);
    std::mt19937_64 rng(19);
    VectorField v = leray_project(dealias(random_vector(g, rng)));

    // Quarter turn about z: x' = -y, y' = x; v'(x) = R v(R^{-1} x).
    const int n = g.n();
    VectorField vr(g);
    auto sx = v[0].physical(), sy = v[1].physical(), sz = v[2].physical();
    auto rx = vr[0].physical_mut(), ry = vr[1].physical_mut(), rz = vr[2].physical_mut();
    for (int iz = 0; iz < n; ++iz)
        for (int iy = 0; iy < n; ++iy)
            for (int ix = 0; ix < n; ++ix) {
                // R^{-1}(x, y, z) = (y, -x, z).
                const int px = iy, py = (n - ix) % n, pz = iz;
                const std::size_t to = g.physical_index(ix, iy, iz);
                const std::size_t from = g.physical_index(px, py, pz);
                rx[to] = -sy[from];
                ry[to] = sx[from];
                rz[to] = sz[from];
            }

    CriterionField orig = kappa_beta_field(v, 1.5);
    CriterionField rot = kappa_beta_field(vr, 1.5);
    auto o = orig.values.physical();
    auto r = rot.values.physical();
    double diff = 0.0;
    for (int iz = 0; iz < n; ++iz)
        for (int iy = 0; iy < n; ++iy)
            for (int ix = 0; ix < n; ++ix) {
                const int px = iy, py = (n - ix) % n, pz = iz;
                diff = std::max(diff, std::abs(r[g.physical_index(ix, iy, iz)] -
                                               o[g.physical_index(px, py, pz)]));
            }
    CHECK(diff <= 1e-10);
}

TEST_CASE("criterion dispatch and parameter validation") {
    SpectralGrid g(8);
    std::mt19937_64 rng(23);
    VectorField v = leray_project(random_vector(g, rng));

    CriterionSpec spec;
    spec.kind = CriterionKind::eta;
    CriterionField f = criterion_field(v, spec);
    CHECK(f.kind == CriterionKind::eta);
    CHECK(max_abs_diff(f.values, eta_field(v).values) == 0.0);

    CHECK_THROWS_AS(kappa_beta_field(v, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(kappa_beta_field(v, 2.5), std::invalid_argument);
    CHECK_THROWS_AS(weighted_kappa_b(v, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(direction(v, -1.0), std::invalid_argument);

    CHECK(criterion_name(CriterionKind::kappa_beta) == doctest::String("kappa_beta"));
    CHECK(criterion_name(CriterionKind::weighted_kappa) == doctest::String("weighted_kappa"));
}
