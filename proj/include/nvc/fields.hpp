#pragma once

#include <cmath>

namespace nvc {

/// A field vector in the NV coordinate frame (z along the N-V axis).
/// Units are whatever the field carries: V/m for electric, T for magnetic.
struct FieldVector {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double perp() const { return std::hypot(x, y); }
    double magnitude() const { return std::hypot(std::hypot(x, y), z); }
    /// Azimuth in the NV x-y plane, atan2(y, x).
    double phi() const { return std::atan2(y, x); }

    FieldVector operator-() const { return {-x, -y, -z}; }
};

/// Magnitude plus polar/azimuth angles relative to the NV axis.
struct SphericalDirection {
    double magnitude = 0.0;  // field units
    double theta = 0.0;      // polar angle from z [rad]
    double phi = 0.0;        // azimuth in the x-y plane [rad]
};

inline FieldVector spherical_to_cartesian(const SphericalDirection& dir) {
    const double st = std::sin(dir.theta);
    return {dir.magnitude * st * std::cos(dir.phi),
            dir.magnitude * st * std::sin(dir.phi),
            dir.magnitude * std::cos(dir.theta)};
}

}  // namespace nvc
