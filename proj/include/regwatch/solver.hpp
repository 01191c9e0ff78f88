#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "regwatch/field.hpp"
#include "regwatch/flows.hpp"
#include "regwatch/geometry.hpp"
#include "regwatch/grid.hpp"

namespace regwatch {

// Thrown when a run leaves the trustworthy regime (CFL violation, velocity
// blow-up guard, or under-resolution detected by the spectral tail monitor).
struct InstabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolverConfig {
    int n = 32;
    double dt = 1e-3;
    double end_time = 1.0;
    double nu = 1.0;
    double cfl_limit = 0.5;
    int snapshot_stride = 100;
    int diagnostic_stride = 1;
    double max_velocity_guard = 1e3;
    double tail_energy_limit = 1e-6;
    std::vector<double> betas = {1.0};
    std::vector<CriterionSpec> criteria;
    InitialCondition initial;
};

struct DiagnosticSample {
    double time = 0.0;
    double max_velocity = 0.0;
    double tail_fraction = 0.0;
    std::vector<double> energy;       // per config beta: (1/2) |Lambda^(b/2) v|_2^2
    std::vector<double> dissipation;  // per config beta: |grad Lambda^(b/2) v|_2^2
    std::vector<double> production;   // per config beta: integral (v x w) . Lambda^b v
    std::vector<double> criterion_norms; // per config criterion: spatial norm at this time
};

struct TrajectorySample {
    double time;
    VectorField velocity;
};

struct Trajectory {
    double nu = 1.0;
    std::vector<double> betas;
    std::vector<CriterionSpec> criteria;
    std::vector<TrajectorySample> snapshots;
    std::vector<DiagnosticSample> diagnostics;
};

// P(v x curl v) with the quadratic product dealiased; inputs are masked to the
// dealias band first so the result is the exact band-limited nonlinearity.
VectorField nonlinear_rotational(const VectorField& v);

double max_velocity(const VectorField& v);
// Energy fraction in the outer third of the dealias band; a growing value
// means the run is no longer resolved.
double tail_energy_fraction(const VectorField& v);

struct EnergyTriple {
    double energy;
    double dissipation;
    double production;
};
// All three terms of the graded energy balance d/dt E_b + nu D_b = T_b,
// evaluated spectrally against the supplied nonlinear term.
EnergyTriple energy_diagnostics(const VectorField& v, const VectorField& nonlinear, double beta);

// One integrating-factor RK4 step: the viscous semigroup is applied exactly as
// a Fourier multiplier, the projected nonlinearity is advanced by classical RK4.
class Stepper {
  public:
    Stepper(const SpectralGrid& grid, double dt, double nu);

    VectorField step(const VectorField& v) const;
    VectorField step(const VectorField& v, const VectorField& n1) const;

    double dt() const { return dt_; }
    double nu() const { return nu_; }

  private:
    SpectralGrid grid_;
    double dt_, nu_;
    AlignedVector<double> half_, full_; // exp(-nu |k|^2 dt/2) and its square
};

Trajectory simulate(const SolverConfig& config);

// Pressure with zero-mean gauge from the spectral Poisson solve of
// laplace(p + |v|^2/2) = div(v x curl v).
ScalarField pressure_from_velocity(const VectorField& v);

} // namespace regwatch
