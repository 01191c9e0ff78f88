#include "regwatch/field.hpp"

#include <algorithm>
#include <cmath>

#include "regwatch/fft_engine.hpp"

namespace regwatch {

ScalarField::ScalarField(const SpectralGrid& grid)
    : grid_(grid),
      phys_(grid.physical_size(), 0.0),
      spec_(grid.spectral_size(), Complex(0.0, 0.0)),
      state_(State::both) {}

void ScalarField::sync_physical() const {
    if (state_ == State::spectral_only) {
        fft::backward(grid_.n(), spec_.data(), phys_.data());
        state_ = State::both;
    }
}

void ScalarField::sync_spectral() const {
    if (state_ == State::physical_only) {
        fft::forward(grid_.n(), phys_.data(), spec_.data());
        state_ = State::both;
    }
}

std::span<const double> ScalarField::physical() const {
    sync_physical();
    return {phys_.data(), phys_.size()};
}

std::span<const Complex> ScalarField::spectral() const {
    sync_spectral();
    return {spec_.data(), spec_.size()};
}

std::span<double> ScalarField::physical_mut() {
    sync_physical();
    state_ = State::physical_only;
    return {phys_.data(), phys_.size()};
}

std::span<Complex> ScalarField::spectral_mut() {
    sync_spectral();
    state_ = State::spectral_only;
    return {spec_.data(), spec_.size()};
}

void ScalarField::fill(double value) {
    std::fill(phys_.begin(), phys_.end(), value);
    std::fill(spec_.begin(), spec_.end(), Complex(0.0, 0.0));
    spec_[0] = value;
    state_ = State::both;
}

bool is_divergence_free(const VectorField& v, double tol) {
    const SpectralGrid& g = v.grid();
    auto sx = v[0].spectral();
    auto sy = v[1].spectral();
    auto sz = v[2].spectral();
    double max_div = 0.0;
    double max_mode = 0.0;
    const int n = g.n();
    for (int iz = 0; iz < n; ++iz) {
        const double kz = g.wavenumber(iz);
        for (int iy = 0; iy < n; ++iy) {
            const double ky = g.wavenumber(iy);
            for (int ix = 0; ix < g.nx_half(); ++ix) {
                const double kx = ix;
                const std::size_t s = g.spectral_index(ix, iy, iz);
                const Complex div = kx * sx[s] + ky * sy[s] + kz * sz[s];
                max_div = std::max(max_div, std::abs(div));
                const double mode =
                    std::max({std::abs(sx[s]), std::abs(sy[s]), std::abs(sz[s])});
                max_mode = std::max(max_mode, mode);
            }
        }
    }
    if (max_mode == 0.0) return true;
    return max_div <= tol * max_mode;
}

} // namespace regwatch
