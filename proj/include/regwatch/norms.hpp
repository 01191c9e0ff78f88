#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "regwatch/field.hpp"
#include "regwatch/grid.hpp"

namespace regwatch {

inline constexpr double inf_exponent = std::numeric_limits<double>::infinity();

// Integration domain: the whole space-time slab, or a parabolic cylinder
// B(center, r) x (top_time - r^2, top_time) with periodic distance on the torus.
struct Region {
    enum class Kind { full, cylinder };

    Kind kind = Kind::full;
    std::array<double, 3> center{0.0, 0.0, 0.0};
    double top_time = 0.0;
    double radius = 0.0;

    static Region full_domain() { return Region{}; }
    static Region cylinder(const std::array<double, 3>& center, double top_time, double radius);
};

struct TimeWindow {
    double begin = 0.0;
    double end = 0.0;
};

// Ball indicator on the lattice; a point is inside iff its periodic distance
// to the center is < r. Requires 0 < r < pi so the ball cannot wrap onto itself.
std::vector<std::uint8_t> cylinder_mask(const SpectralGrid& grid,
                                        const std::array<double, 3>& center, double r);

// Lattice L^gamma norm, (dx^3 sum |f|^gamma)^(1/gamma); gamma = inf is the max.
// The masked variants restrict sums and maxima to mask != 0.
double spatial_norm(const ScalarField& f, double gamma);
double spatial_norm(const ScalarField& f, double gamma, std::span<const std::uint8_t> mask);
double spatial_norm(const VectorField& v, double gamma);
double spatial_norm(const VectorField& v, double gamma, std::span<const std::uint8_t> mask);

// L^alpha in time of a sampled series by trapezoid quadrature, with linear
// interpolation of the series at the window edges; alpha = inf is the window max.
double mixed_norm(std::span<const double> times, std::span<const double> values, double alpha,
                  TimeWindow window);

// Homogeneous Sobolev seminorm ((2pi)^3 sum |k|^(2s) |f_k|^2)^(1/2), zero mode excluded.
double sobolev_norm(const ScalarField& f, double s);
double sobolev_norm(const VectorField& v, double s);
// Full H^s norm including the L^2 part (and with it the mean).
double sobolev_norm_inhomogeneous(const VectorField& v, double s);

} // namespace regwatch
