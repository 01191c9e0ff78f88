#pragma once

#include <cstdint>

#include "regwatch/field.hpp"
#include "regwatch/grid.hpp"

namespace regwatch {

struct InitialCondition {
    enum class Kind { taylor_green, abc, random_divfree, zero };

    Kind kind = Kind::taylor_green;
    double A = 1.0, B = 1.0, C = 1.0; // abc
    double slope = -5.0 / 3.0;        // random shell spectrum exponent
    std::uint64_t seed = 1;
    double amplitude = 1.0;           // random field L2 norm
};

VectorField initial_taylor_green(const SpectralGrid& grid);
VectorField initial_abc(const SpectralGrid& grid, double A, double B, double C);
// Divergence-free field with shell energy ~ k^slope on 2 <= |k| <= n/3,
// reproducible from the seed, scaled to the requested L2 norm.
VectorField initial_random_divfree(const SpectralGrid& grid, double slope, std::uint64_t seed,
                                   double amplitude);
VectorField make_initial(const SpectralGrid& grid, const InitialCondition& ic);

} // namespace regwatch
