#pragma once

#include <array>
#include <vector>

#include "regwatch/exponents.hpp"
#include "regwatch/geometry.hpp"
#include "regwatch/norms.hpp"
#include "regwatch/solver.hpp"

namespace regwatch {

// Per-interval check of dE_b/dt + nu D_b = T_b on the diagnostic samples:
// centered difference for the energy, midpoint rule for dissipation and
// production. `relative` is max |residual| over max nu D_b.
struct BalanceResiduals {
    std::vector<double> midpoint_times;
    std::vector<double> residuals;
    double max_abs = 0.0;
    double scale = 0.0;
    double relative = 0.0;
    double tolerance = 0.0;
    bool within = false;
    // Set when the energy moves by more than a few percent across a single
    // sampling interval; the quadrature cannot be trusted then.
    bool sparse = false;
};

BalanceResiduals energy_balance_residual(const Trajectory& trajectory,
                                         double beta,
                                         double tolerance = 1e-4);

// Pointwise-in-time margins for the three-factor split of the production
// integral. For each snapshot:
//   production      = sum (v x w) . L^b v dV   (lattice quadrature)
//   triple_integral = sum k_b |w| |L^b v| dV
//   norm_product    = ||k_b||_g ||w||_p ||L^b v||_q
// positivity_margin = triple_integral - production >= 0 and holder_margin =
// norm_product - triple_integral >= 0, both up to roundoff scaled tolerance.
struct HolderMargins {
    std::vector<double> times;
    std::vector<double> production;
    std::vector<double> triple_integral;
    std::vector<double> norm_product;
    std::vector<double> positivity_margin;
    std::vector<double> holder_margin;
    PqPair exponents;
    double tolerance = 0.0;
    bool holds = false;
};

HolderMargins holder_triple_check(const Trajectory& trajectory, double beta,
                                  double gamma, double tolerance = 1e-12);

// Empirical constant for one convexity inequality on a single field.
//   vorticity:  ||curl v||_p   <= C X^low Y^high, X = |v|_{b/2}, Y = |v|_{1+b/2}
//   fractional: ||L^b v||_q    <= C X^low Y^high
//   gradient:   ||grad v||_{2g/(g-2)} <= C ||grad v||_2^low ||Dv||_2^high
// where |.|_s is the homogeneous Sobolev seminorm. `ratio` is LHS over the
// power product; the max over a corpus calibrates C.
enum class InterpolationKind { vorticity, fractional, gradient };

struct InterpolationResult {
    InterpolationKind kind = InterpolationKind::vorticity;
    double lhs = 0.0;
    double factor_low = 0.0;
    double factor_high = 0.0;
    PowerPair powers;
    double ratio = 0.0;
};

InterpolationResult interpolation_check(const VectorField& v,
                                        InterpolationKind kind,
                                        double exponent, double beta = 1.0);

// Exact-weight splitting of a three-factor product: for u > 3,
//   a x^{(g-3)/g} y^{(g+3)/g}
//     <= (g-3)/(2g) a^{2g/(g-3)} x^2 + (g+3)/(2g) y^2.
// Returns bound minus product, mathematically nonnegative.
double young_split_margin(double factor, double energy_norm,
                          double gradient_norm, double gamma);

// Integral envelope sup_t X^2(t) <= H0^2 exp(C K) with X^2 = 2 E_b,
// H0^2 = ||v0||^2 + X^2(0), and K the time integral of the spatial criterion
// norm raised to 2g/(g-3). `minimal_constant` is the smallest C for which the
// envelope holds (0 when it holds with C = 0, infinity when K = 0 yet the sup
// exceeds H0^2).
struct GronwallReport {
    double initial_value = 0.0;
    double sup_value = 0.0;
    double exponent_integral = 0.0;
    Rational time_exponent;
    double constant = 0.0;
    double envelope = 0.0;
    double minimal_constant = 0.0;
    bool holds = false;
};

GronwallReport gronwall_envelope(const Trajectory& trajectory, double gamma,
                                 double beta, double constant);

// Mixed norm of one recorded criterion over its own region, compared against
// a configured threshold. Only the pinned-exponent hypothesis shapes are
// accepted. The window reports the cylinder time range after clipping to the
// sampled interval.
struct SmallnessReport {
    double value = 0.0;
    double epsilon = 0.0;
    bool small = false;
    TimeWindow window{0.0, 0.0};
    bool clipped = false;
};

SmallnessReport smallness_monitor(const Trajectory& trajectory,
                                  const CriterionSpec& spec, double epsilon);

// Separable space-time test weight phi(x, t) = scale B(x) g(t) with
// B(x) = prod_i ((1 + cos(x_i - c_i)) / 2)^sharpness and g either a
// half-sine-squared pulse over the window or identically one.
struct TestWeight {
    std::array<double, 3> center{SpectralGrid::pi, SpectralGrid::pi, SpectralGrid::pi};
    int sharpness = 2;
    double scale = 1.0;
    enum class Profile { pulse, constant } profile = Profile::pulse;
};

// Cumulative check of the localized energy identity
//   int |v(t)|^2 phi(t) + 2 int_0^t int |grad v|^2 phi
//     = int |v(0)|^2 phi(0)
//       + int_0^t int ( |v|^2 (phi_t + D phi) + (|v|^2 + 2p) v . grad phi ).
// residual = LHS - RHS per sample; residual <= tol asserts the inequality
// form, |residual| <= tol the smooth-solution identity. `relative` scales the
// worst residual by the final dissipation term.
struct LocalEnergyReport {
    std::vector<double> times;
    std::vector<double> lhs;
    std::vector<double> rhs;
    std::vector<double> residual;
    double initial_term = 0.0;
    double dissipation_term = 0.0;
    double time_derivative_term = 0.0;
    double diffusion_term = 0.0;
    double transport_term = 0.0;
    double max_abs_residual = 0.0;
    double relative = 0.0;
    double tolerance = 0.0;
    bool within = false;
};

LocalEnergyReport local_energy_residual(const Trajectory& trajectory,
                                        const TestWeight& phi,
                                        double tolerance = 1e-5);

// Same check driven directly off a fresh simulation, accumulating the time
// integrals at every step instead of storing snapshots.
LocalEnergyReport local_energy_residual(const SolverConfig& config,
                                        const TestWeight& phi,
                                        double tolerance = 1e-5);

// One estimate-chain summary for a trajectory at fixed (beta, gamma):
// per-sample series plus the aggregate mixed norm, balance residuals, and
// envelope. `constant` feeds the envelope check.
struct EstimateReport {
    double beta = 0.0;
    double gamma = 0.0;
    double alpha = 0.0;
    std::vector<double> times;
    std::vector<double> energy;
    std::vector<double> dissipation;
    std::vector<double> production;
    std::vector<double> criterion_norm;
    double mixed_norm_value = 0.0;
    BalanceResiduals balance;
    GronwallReport envelope;
};

EstimateReport make_estimate_report(const Trajectory& trajectory, double beta,
                                    double gamma, double constant,
                                    double balance_tolerance = 1e-4);

} // namespace regwatch
