#pragma once

#include "regwatch/field.hpp"

namespace regwatch {

// Fractional derivative: mode k scaled by |k|^beta, zero mode always mapped to 0,
// so the result is the representative modulo constants. beta in [0,4].
ScalarField lambda_beta(const ScalarField& f, double beta);
VectorField lambda_beta(const VectorField& v, double beta);

VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& v);
VectorField curl(const VectorField& v);
ScalarField laplacian(const ScalarField& f);
VectorField laplacian(const VectorField& v);

// v^(k) <- v^(k) - k (k.v^(k)) / |k|^2; the zero mode is untouched.
VectorField leray_project(const VectorField& v);
void leray_project_in_place(VectorField& v);

// 2/3-rule truncation.
ScalarField dealias(const ScalarField& f);
VectorField dealias(const VectorField& v);
void dealias_in_place(ScalarField& f);
void dealias_in_place(VectorField& v);

// True when every mode with any |k_i| > n/3 is exactly zero.
bool is_band_limited(const VectorField& v, double tol = 1e-13);

// Pointwise cross product in physical space, w = a x b.
VectorField cross(const VectorField& a, const VectorField& b);

} // namespace regwatch
