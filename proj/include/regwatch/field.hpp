#pragma once

#include <array>
#include <complex>
#include <cstdlib>
#include <new>
#include <span>
#include <vector>

#include "regwatch/grid.hpp"

namespace regwatch {

namespace detail {

// 32-byte aligned storage so FFTW SIMD kernels apply to every field buffer.
template <class T>
struct FftwAllocator {
    using value_type = T;
    FftwAllocator() = default;
    template <class U>
    FftwAllocator(const FftwAllocator<U>&) {}

    T* allocate(std::size_t count) {
        void* p = std::aligned_alloc(32, ((count * sizeof(T) + 31) / 32) * 32);
        if (!p) throw std::bad_alloc();
        return static_cast<T*>(p);
    }
    void deallocate(T* p, std::size_t) { std::free(p); }

    template <class U>
    bool operator==(const FftwAllocator<U>&) const { return true; }
};

} // namespace detail

template <class T>
using AlignedVector = std::vector<T, detail::FftwAllocator<T>>;

using Complex = std::complex<double>;

// A real scalar field holding both representations. Whichever side was written
// last is authoritative; the other is recomputed on demand. The lazy sync makes
// a single field unsafe to share across threads, distinct fields are fine.
class ScalarField {
  public:
    explicit ScalarField(const SpectralGrid& grid);

    const SpectralGrid& grid() const { return grid_; }

    std::span<const double> physical() const;
    std::span<const Complex> spectral() const;

    // Mutable access invalidates the other representation.
    std::span<double> physical_mut();
    std::span<Complex> spectral_mut();

    bool physical_current() const { return state_ != State::spectral_only; }
    bool spectral_current() const { return state_ != State::physical_only; }

    void fill(double value);

  private:
    enum class State { physical_only, spectral_only, both };

    void sync_physical() const;
    void sync_spectral() const;

    SpectralGrid grid_;
    mutable AlignedVector<double> phys_;
    mutable AlignedVector<Complex> spec_;
    mutable State state_;
};

class VectorField {
  public:
    explicit VectorField(const SpectralGrid& grid)
        : components_{ScalarField(grid), ScalarField(grid), ScalarField(grid)} {}

    const SpectralGrid& grid() const { return components_[0].grid(); }

    ScalarField& operator[](int i) { return components_[i]; }
    const ScalarField& operator[](int i) const { return components_[i]; }

    static constexpr int dimensions = 3;

  private:
    std::array<ScalarField, 3> components_;
};

// max_k |k . v^(k)| <= tol * max_k |v^(k)|, the divergence-free invariant.
bool is_divergence_free(const VectorField& v, double tol = 1e-10);

} // namespace regwatch
