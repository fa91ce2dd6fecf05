#pragma once

#include <cmath>
#include <stdexcept>

#include "nvc/constants.hpp"
#include "nvc/fields.hpp"

namespace nvc {

/// Parallel-contact electrode pair on the diamond surface.
struct ElectrodeGeometry {
    double applied_voltage = 0.0;  // V
    double gap = 0.0;              // m
    double dielectric_kd = 5.7;    // diamond
    double dielectric_kout = 2.3;  // immersion oil
    double nv_depth = 40e-9;       // m
};

/// Bulk field from the applied voltage under the zero-interface-voltage
/// assumption: E = V / gap.
inline double uniform_field_from_voltage(const ElectrodeGeometry& g) {
    if (!(g.gap > 0.0)) throw std::invalid_argument("uniform_field_from_voltage: gap must be > 0");
    return g.applied_voltage / g.gap;
}

/// Field magnitude at distance r from a surface point charge q with the
/// dielectric boundary factor 2/(kd + kout); screening is not modeled.
inline double point_charge_field(double q, double r, double kd, double kout,
                                 const PhysicalConstants& c = {}) {
    if (!(r > 0.0)) throw std::invalid_argument("point_charge_field: r must be > 0");
    if (kd < 1.0 || kout < 1.0)
        throw std::invalid_argument("point_charge_field: dielectric constants must be >= 1");
    return c.coulomb_constant() * (2.0 / (kd + kout)) * q / (r * r);
}

/// Same field expressed as magnitude plus direction along the charge-to-NV
/// displacement vector (NV-frame components).
inline SphericalDirection point_charge_field_at(double q, const FieldVector& charge_to_nv,
                                                double kd, double kout,
                                                const PhysicalConstants& c = {}) {
    const double r = charge_to_nv.magnitude();
    SphericalDirection dir;
    dir.magnitude = point_charge_field(q, r, kd, kout, c);
    dir.theta = std::acos(charge_to_nv.z / r);
    dir.phi = std::atan2(charge_to_nv.y, charge_to_nv.x);
    return dir;
}

}  // namespace nvc
