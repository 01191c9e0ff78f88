#include "regwatch/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include "regwatch/spectral_ops.hpp"

namespace regwatch {

VectorField direction(const VectorField& u, double floor) {
    if (floor < 0.0) throw std::invalid_argument("direction: floor must be >= 0");
    const SpectralGrid& g = u.grid();
    VectorField out(g);
    auto ux = u[0].physical(), uy = u[1].physical(), uz = u[2].physical();
    const std::size_t np = g.physical_size();

    double max_mag = 0.0;
    for (std::size_t i = 0; i < np; ++i)
        max_mag = std::max(max_mag, ux[i] * ux[i] + uy[i] * uy[i] + uz[i] * uz[i]);
    max_mag = std::sqrt(max_mag);
    const double cutoff = floor * max_mag;

    auto ox = out[0].physical_mut();
    auto oy = out[1].physical_mut();
    auto oz = out[2].physical_mut();
    for (std::size_t i = 0; i < np; ++i) {
        const double mag = std::sqrt(ux[i] * ux[i] + uy[i] * uy[i] + uz[i] * uz[i]);
        if (mag <= cutoff || mag == 0.0) {
            ox[i] = oy[i] = oz[i] = 0.0;
        } else {
            ox[i] = ux[i] / mag;
            oy[i] = uy[i] / mag;
            oz[i] = uz[i] / mag;
        }
    }
    return out;
}

namespace {

// (a x b) . c pointwise, clipped to the positive part.
ScalarField positive_triple(const VectorField& a, const VectorField& b, const VectorField& c) {
    const SpectralGrid& g = a.grid();
    ScalarField out(g);
    auto ax = a[0].physical(), ay = a[1].physical(), az = a[2].physical();
    auto bx = b[0].physical(), by = b[1].physical(), bz = b[2].physical();
    auto cx = c[0].physical(), cy = c[1].physical(), cz = c[2].physical();
    auto o = out.physical_mut();
    const std::size_t np = g.physical_size();
    for (std::size_t i = 0; i < np; ++i) {
        const double tx = ay[i] * bz[i] - az[i] * by[i];
        const double ty = az[i] * bx[i] - ax[i] * bz[i];
        const double tz = ax[i] * by[i] - ay[i] * bx[i];
        o[i] = std::max(tx * cx[i] + ty * cy[i] + tz * cz[i], 0.0);
    }
    return out;
}

} // namespace

CriterionField kappa_beta_field(const VectorField& v, double beta, double floor) {
    if (beta < 1.0 || beta > 2.0)
        throw std::invalid_argument("kappa_beta_field: beta must lie in [1, 2]");
    VectorField omega = curl(v);
    VectorField lv = lambda_beta(v, beta);
    return CriterionField{CriterionKind::kappa_beta, beta,
                          positive_triple(v, direction(omega, floor), direction(lv, floor))};
}

CriterionField kappa_field(const VectorField& v, double floor) {
    VectorField omega = curl(v);
    VectorField curl_omega = curl(omega);
    return CriterionField{CriterionKind::kappa, 0.0,
                          positive_triple(v, direction(omega, floor), direction(curl_omega, floor))};
}

CriterionField eta_field(const VectorField& v, double floor) {
    VectorField omega = curl(v);
    VectorField curl_omega = curl(omega);
    return CriterionField{CriterionKind::eta, 0.0,
                          positive_triple(direction(v, floor), omega, direction(curl_omega, floor))};
}

CriterionField weighted_kappa_b(const VectorField& v, double b, double floor) {
    if (!(b > 0.0)) throw std::invalid_argument("weighted_kappa_b: b must be > 0");
    VectorField omega = curl(v);
    VectorField curl_omega = curl(omega);
    ScalarField triple =
        positive_triple(direction(v, floor), direction(omega, floor), direction(curl_omega, floor));

    auto vx = v[0].physical(), vy = v[1].physical(), vz = v[2].physical();
    auto t = triple.physical_mut();
    const std::size_t np = v.grid().physical_size();
    for (std::size_t i = 0; i < np; ++i) {
        const double mag = std::sqrt(vx[i] * vx[i] + vy[i] * vy[i] + vz[i] * vz[i]);
        t[i] *= std::pow(mag, b);
    }
    return CriterionField{CriterionKind::weighted_kappa, b, std::move(triple)};
}

CriterionField criterion_field(const VectorField& v, const CriterionSpec& spec) {
    switch (spec.kind) {
        case CriterionKind::kappa_beta:
            return kappa_beta_field(v, spec.parameter, spec.direction_floor);
        case CriterionKind::kappa:
            return kappa_field(v, spec.direction_floor);
        case CriterionKind::eta:
            return eta_field(v, spec.direction_floor);
        case CriterionKind::weighted_kappa:
            return weighted_kappa_b(v, spec.parameter, spec.direction_floor);
    }
    throw std::logic_error("criterion_field: unknown kind");
}

const char* criterion_name(CriterionKind kind) {
    switch (kind) {
        case CriterionKind::kappa_beta: return "kappa_beta";
        case CriterionKind::kappa: return "kappa";
        case CriterionKind::eta: return "eta";
        case CriterionKind::weighted_kappa: return "weighted_kappa";
    }
    return "unknown";
}

} // namespace regwatch
