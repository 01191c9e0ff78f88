#include "regwatch/norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace regwatch {

namespace {

double periodic_delta(double a, double b) {
    const double two_pi = 2.0 * SpectralGrid::pi;
    double d = std::fmod(std::abs(a - b), two_pi);
    return std::min(d, two_pi - d);
}

template <class Magnitude>
double norm_from_samples(const SpectralGrid& g, double gamma, Magnitude&& magnitude,
                         std::span<const std::uint8_t> mask) {
    if (gamma < 1.0) throw std::invalid_argument("spatial_norm: exponent must be >= 1");
    if (!mask.empty() && mask.size() != g.physical_size())
        throw std::invalid_argument("spatial_norm: mask size mismatch");

    const std::size_t np = g.physical_size();
    bool any = mask.empty();
    if (std::isinf(gamma)) {
        double m = 0.0;
        for (std::size_t i = 0; i < np; ++i) {
            if (!mask.empty() && !mask[i]) continue;
            any = true;
            m = std::max(m, magnitude(i));
        }
        if (!any) throw std::invalid_argument("spatial_norm: empty mask");
        return m;
    }

    double sum = 0.0;
    for (std::size_t i = 0; i < np; ++i) {
        if (!mask.empty() && !mask[i]) continue;
        any = true;
        sum += std::pow(magnitude(i), gamma);
    }
    if (!any) throw std::invalid_argument("spatial_norm: empty mask");
    return std::pow(sum * g.cell_volume(), 1.0 / gamma);
}

} // namespace

Region Region::cylinder(const std::array<double, 3>& center, double top_time, double radius) {
    if (!(radius > 0.0) || radius >= SpectralGrid::pi)
        throw std::invalid_argument("Region: cylinder radius must lie in (0, pi)");
    Region r;
    r.kind = Kind::cylinder;
    r.center = center;
    r.top_time = top_time;
    r.radius = radius;
    return r;
}

std::vector<std::uint8_t> cylinder_mask(const SpectralGrid& grid,
                                        const std::array<double, 3>& center, double r) {
    if (!(r > 0.0) || r >= SpectralGrid::pi)
        throw std::invalid_argument("cylinder_mask: radius must lie in (0, pi)");
    std::vector<std::uint8_t> mask(grid.physical_size(), 0);
    const int n = grid.n();
    const double r2 = r * r;
    for (int iz = 0; iz < n; ++iz) {
        const double dz = periodic_delta(grid.point(iz), center[2]);
        for (int iy = 0; iy < n; ++iy) {
            const double dy = periodic_delta(grid.point(iy), center[1]);
            for (int ix = 0; ix < n; ++ix) {
                const double dx = periodic_delta(grid.point(ix), center[0]);
                if (dx * dx + dy * dy + dz * dz < r2)
                    mask[grid.physical_index(ix, iy, iz)] = 1;
            }
        }
    }
    return mask;
}

double spatial_norm(const ScalarField& f, double gamma) {
    return spatial_norm(f, gamma, {});
}

double spatial_norm(const ScalarField& f, double gamma, std::span<const std::uint8_t> mask) {
    auto p = f.physical();
    return norm_from_samples(f.grid(), gamma, [&](std::size_t i) { return std::abs(p[i]); }, mask);
}

double spatial_norm(const VectorField& v, double gamma) {
    return spatial_norm(v, gamma, {});
}

double spatial_norm(const VectorField& v, double gamma, std::span<const std::uint8_t> mask) {
    auto x = v[0].physical();
    auto y = v[1].physical();
    auto z = v[2].physical();
    return norm_from_samples(
        v.grid(), gamma,
        [&](std::size_t i) { return std::sqrt(x[i] * x[i] + y[i] * y[i] + z[i] * z[i]); }, mask);
}

double mixed_norm(std::span<const double> times, std::span<const double> values, double alpha,
                  TimeWindow window) {
    if (alpha < 1.0) throw std::invalid_argument("mixed_norm: exponent must be >= 1");
    if (times.size() != values.size() || times.empty())
        throw std::invalid_argument("mixed_norm: times and values must match and be nonempty");
    if (window.end < window.begin) throw std::invalid_argument("mixed_norm: window reversed");
    if (window.begin < times.front() - 1e-12 || window.end > times.back() + 1e-12)
        throw std::out_of_range("mixed_norm: window outside sampled range");

    auto value_at = [&](double t) {
        auto it = std::lower_bound(times.begin(), times.end(), t);
        if (it == times.begin()) return values.front();
        if (it == times.end()) return values.back();
        const std::size_t hi = std::size_t(it - times.begin());
        const std::size_t lo = hi - 1;
        const double span = times[hi] - times[lo];
        if (span <= 0.0) return values[hi];
        const double w = (t - times[lo]) / span;
        return (1.0 - w) * values[lo] + w * values[hi];
    };

    if (std::isinf(alpha)) {
        double m = std::max(value_at(window.begin), value_at(window.end));
        for (std::size_t i = 0; i < times.size(); ++i)
            if (times[i] >= window.begin && times[i] <= window.end) m = std::max(m, values[i]);
        return m;
    }

    if (times.size() < 2) throw std::invalid_argument("mixed_norm: need >= 2 samples");

    // Trapezoid over the window on the piecewise-linear series, with the two
    // partial end intervals handled by interpolated edge values.
    double acc = 0.0;
    double prev_t = window.begin;
    double prev_f = std::pow(value_at(window.begin), alpha);
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] <= window.begin) continue;
        if (times[i] >= window.end) break;
        const double f = std::pow(values[i], alpha);
        acc += 0.5 * (times[i] - prev_t) * (prev_f + f);
        prev_t = times[i];
        prev_f = f;
    }
    const double end_f = std::pow(value_at(window.end), alpha);
    acc += 0.5 * (window.end - prev_t) * (prev_f + end_f);
    return std::pow(acc, 1.0 / alpha);
}

namespace {

double sobolev_sq(const ScalarField& f, double s) {
    const SpectralGrid& g = f.grid();
    auto spec = f.spectral();
    const double vol = g.volume();
    double sum = 0.0;
    const int n = g.n();
    for (int iz = 0; iz < n; ++iz) {
        const double kz = g.wavenumber(iz);
        for (int iy = 0; iy < n; ++iy) {
            const double ky = g.wavenumber(iy);
            for (int ix = 0; ix < g.nx_half(); ++ix) {
                const double k2 = double(ix) * ix + ky * ky + kz * kz;
                if (k2 == 0.0) continue;
                sum += g.spectral_weight(ix) * std::pow(k2, s) *
                       std::norm(spec[g.spectral_index(ix, iy, iz)]);
            }
        }
    }
    return vol * sum;
}

} // namespace

double sobolev_norm(const ScalarField& f, double s) {
    if (s < 0.0) throw std::invalid_argument("sobolev_norm: s must be >= 0");
    return std::sqrt(sobolev_sq(f, s));
}

double sobolev_norm(const VectorField& v, double s) {
    if (s < 0.0) throw std::invalid_argument("sobolev_norm: s must be >= 0");
    double sum = 0.0;
    for (int c = 0; c < 3; ++c) sum += sobolev_sq(v[c], s);
    return std::sqrt(sum);
}

double sobolev_norm_inhomogeneous(const VectorField& v, double s) {
    const double hs = sobolev_norm(v, s);
    const double l2 = spatial_norm(v, 2.0);
    return std::sqrt(hs * hs + l2 * l2);
}

} // namespace regwatch
