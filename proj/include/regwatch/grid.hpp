#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace regwatch {

// Uniform periodic grid on [0,2pi)^3 with n points per axis and the integer
// wavenumber lattice of the associated Fourier series. Real fields are stored
// x-fastest; spectra use the real-input half-spectrum with kx in [0, n/2].
class SpectralGrid {
  public:
    explicit SpectralGrid(int n) : n_(n) {
        if (n < 8 || n % 2 != 0)
            throw std::invalid_argument("SpectralGrid: n must be even and >= 8");
    }

    int n() const { return n_; }
    std::size_t physical_size() const { return std::size_t(n_) * n_ * n_; }
    std::size_t spectral_size() const { return std::size_t(n_) * n_ * (n_ / 2 + 1); }

    double length() const { return 2.0 * pi * 1.0; }
    double dx() const { return 2.0 * pi / n_; }
    double cell_volume() const { return dx() * dx() * dx(); }
    double volume() const { return length() * length() * length(); }

    // Integer frequency for a full-axis index (y and z axes): 0..n/2, then negative.
    int wavenumber(int index) const { return index <= n_ / 2 ? index : index - n_; }

    // Half-spectrum x frequencies are the index itself, 0..n/2.
    int nx_half() const { return n_ / 2 + 1; }

    std::size_t spectral_index(int ix_half, int iy, int iz) const {
        return std::size_t(ix_half) + std::size_t(nx_half()) * (std::size_t(iy) + std::size_t(n_) * iz);
    }
    std::size_t physical_index(int ix, int iy, int iz) const {
        return std::size_t(ix) + std::size_t(n_) * (std::size_t(iy) + std::size_t(n_) * iz);
    }

    // Parseval weight of a stored half-spectrum coefficient: interior kx planes
    // represent a conjugate pair.
    double spectral_weight(int ix_half) const {
        return (ix_half == 0 || ix_half == n_ / 2) ? 1.0 : 2.0;
    }

    // 2/3-rule cutoff: modes with any |k_i| > dealias_cutoff() are discarded.
    int dealias_cutoff() const { return n_ / 3; }
    bool dealias_keep(int kx, int ky, int kz) const {
        const int kd = dealias_cutoff();
        return std::abs(kx) <= kd && std::abs(ky) <= kd && std::abs(kz) <= kd;
    }

    double point(int index) const { return dx() * index; }

    friend bool operator==(const SpectralGrid& a, const SpectralGrid& b) { return a.n_ == b.n_; }
    friend bool operator!=(const SpectralGrid& a, const SpectralGrid& b) { return a.n_ != b.n_; }

    static constexpr double pi = 3.14159265358979323846;

  private:
    int n_;
};

inline void require_same_grid(const SpectralGrid& a, const SpectralGrid& b) {
    if (a != b)
        throw std::invalid_argument("grid size mismatch");
}

} // namespace regwatch
