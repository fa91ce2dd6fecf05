#pragma once

#include <stdexcept>
#include <string>

namespace nvc {

enum class Unit {
    volt_per_m,
    kilovolt_per_cm,
    tesla,
    microtesla,
    hertz,
    megahertz,
    hz_per_volt_per_m,   // electric dipole over h
    khz_cm_per_kv,
    second,
    millisecond,
};

namespace detail {

enum class Dimension { electric_field, magnetic_field, frequency, dipole_over_h, time };

struct UnitInfo {
    Dimension dim;
    double to_si;  // multiply to get the SI member of the group
};

inline UnitInfo unit_info(Unit u) {
    switch (u) {
        case Unit::volt_per_m:        return {Dimension::electric_field, 1.0};
        case Unit::kilovolt_per_cm:   return {Dimension::electric_field, 1e5};
        case Unit::tesla:             return {Dimension::magnetic_field, 1.0};
        case Unit::microtesla:        return {Dimension::magnetic_field, 1e-6};
        case Unit::hertz:             return {Dimension::frequency, 1.0};
        case Unit::megahertz:         return {Dimension::frequency, 1e6};
        case Unit::hz_per_volt_per_m: return {Dimension::dipole_over_h, 1.0};
        case Unit::khz_cm_per_kv:     return {Dimension::dipole_over_h, 1e-2};  // 1e3 Hz per 1e5 V/m
        case Unit::second:            return {Dimension::time, 1.0};
        case Unit::millisecond:       return {Dimension::time, 1e-3};
    }
    throw std::invalid_argument("unknown unit");
}

inline const char* unit_name(Unit u) {
    switch (u) {
        case Unit::volt_per_m:        return "V/m";
        case Unit::kilovolt_per_cm:   return "kV/cm";
        case Unit::tesla:             return "T";
        case Unit::microtesla:        return "uT";
        case Unit::hertz:             return "Hz";
        case Unit::megahertz:         return "MHz";
        case Unit::hz_per_volt_per_m: return "Hz/(V/m)";
        case Unit::khz_cm_per_kv:     return "kHz·cm/kV";
        case Unit::second:            return "s";
        case Unit::millisecond:       return "ms";
    }
    return "?";
}

}  // namespace detail

/// Converts between units of the same dimension with exact scale factors.
/// Throws std::invalid_argument for a dimensionally mismatched pair.
inline double convert_unit(double value, Unit from, Unit to) {
    const auto fi = detail::unit_info(from);
    const auto ti = detail::unit_info(to);
    if (fi.dim != ti.dim) {
        throw std::invalid_argument(std::string("unsupported unit conversion: ") +
                                    detail::unit_name(from) + " -> " + detail::unit_name(to));
    }
    return value * (fi.to_si / ti.to_si);
}

}  // namespace nvc
