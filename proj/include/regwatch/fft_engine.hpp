#pragma once

#include <complex>

namespace regwatch::fft {

// Forward: physical n^3 reals (x-fastest) -> half spectrum, normalized by 1/n^3.
// Backward: inverse, unnormalized sum over modes. Both leave their input intact.
void forward(int n, const double* phys, std::complex<double>* spec);
void backward(int n, const std::complex<double>* spec, double* phys);

// Worker threads used by subsequent plans (1 = serial). Call before any transform
// of a given size has been planned; existing plans keep their thread count.
void set_threads(int nthreads);
int threads();

} // namespace regwatch::fft
