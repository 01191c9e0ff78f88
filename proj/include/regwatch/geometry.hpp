#pragma once

#include "regwatch/field.hpp"
#include "regwatch/norms.hpp"

namespace regwatch {

inline constexpr double default_direction_floor = 1e-13;

// u / |u| pointwise, zero vector where |u| <= floor * max|u| (the grid version
// of the convention that direction fields vanish where the vector vanishes).
VectorField direction(const VectorField& u, double floor = default_direction_floor);

enum class CriterionKind { kappa_beta, kappa, eta, weighted_kappa };

struct CriterionSpec {
    CriterionKind kind = CriterionKind::kappa_beta;
    double parameter = 1.0; // beta for kappa_beta, b for weighted_kappa
    double gamma = inf_exponent; // spatial exponent
    double alpha = inf_exponent; // temporal exponent
    Region region = Region::full_domain();
    double direction_floor = default_direction_floor;
};

struct CriterionField {
    CriterionKind kind;
    double parameter;
    ScalarField values;
};

// {(v x dir w) . dir L^beta v}_+ with w = curl v.
CriterionField kappa_beta_field(const VectorField& v, double beta,
                                double floor = default_direction_floor);
// {(v x dir w) . dir curl w}_+.
CriterionField kappa_field(const VectorField& v, double floor = default_direction_floor);
// {(dir v x w) . dir curl w}_+.
CriterionField eta_field(const VectorField& v, double floor = default_direction_floor);
// |v|^b {(dir v x dir w) . dir curl w}_+.
CriterionField weighted_kappa_b(const VectorField& v, double b,
                                double floor = default_direction_floor);

CriterionField criterion_field(const VectorField& v, const CriterionSpec& spec);

const char* criterion_name(CriterionKind kind);

} // namespace regwatch
