#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "nvc/constants.hpp"
#include "nvc/fields.hpp"
#include "nvc/units.hpp"

using namespace nvc;
using Catch::Matchers::WithinRel;

TEST_CASE("physical constants are positive and consistent") {
    const PhysicalConstants c;
    CHECK(c.h > 0.0);
    CHECK(c.hbar > 0.0);
    CHECK(c.mu_B > 0.0);
    CHECK(c.g_e > 0.0);
    CHECK(c.eps0 > 0.0);
    CHECK(c.elementary_charge > 0.0);
    CHECK(c.boltzmann_k > 0.0);
    CHECK_THAT(c.h, WithinRel(2.0 * std::numbers::pi * c.hbar, 1e-12));
}

TEST_CASE("NV parameter defaults match the quoted coupling constants") {
    const NVParameters p;
    CHECK(p.D_gs_over_h == 2.87e9);
    CHECK_THAT(p.d_par_over_h,
               WithinRel(convert_unit(0.35, Unit::khz_cm_per_kv, Unit::hz_per_volt_per_m), 1e-15));
    CHECK_THAT(p.d_perp_over_h,
               WithinRel(convert_unit(17.0, Unit::khz_cm_per_kv, Unit::hz_per_volt_per_m), 1e-15));
    CHECK(p.A_par_over_h == -2.1e6);
    CHECK(p.A_perp_over_h == -2.7e6);
    CHECK(p.P_over_h == -5.0e6);
    CHECK(p.g_e == 2.0028);
    CHECK(p.D_gs_over_h > 0.0);
    CHECK(p.d_perp_over_h > 0.0);
}

TEST_CASE("unit conversions use exact scale factors") {
    CHECK(convert_unit(100.0, Unit::kilovolt_per_cm, Unit::volt_per_m) == 1.0e7);
    CHECK(convert_unit(17.0, Unit::khz_cm_per_kv, Unit::hz_per_volt_per_m) == 0.17);
    CHECK(convert_unit(13.0, Unit::microtesla, Unit::tesla) == 1.3e-5);
    CHECK(convert_unit(2870.0, Unit::megahertz, Unit::hertz) == 2.87e9);
    CHECK(convert_unit(170.0, Unit::millisecond, Unit::second) == 0.17);
}

TEST_CASE("unit conversion round trips are identity") {
    const std::pair<Unit, Unit> pairs[] = {
        {Unit::kilovolt_per_cm, Unit::volt_per_m},
        {Unit::microtesla, Unit::tesla},
        {Unit::megahertz, Unit::hertz},
        {Unit::khz_cm_per_kv, Unit::hz_per_volt_per_m},
        {Unit::millisecond, Unit::second},
    };
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> mag(-12.0, 12.0);
    std::uniform_real_distribution<double> sign(-1.0, 1.0);
    for (const auto& [a, b] : pairs) {
        for (int i = 0; i < 200; ++i) {
            const double v = std::copysign(std::pow(10.0, mag(rng)), sign(rng));
            const double rt = convert_unit(convert_unit(v, a, b), b, a);
            CHECK_THAT(rt, WithinRel(v, 1e-15));
        }
    }
}

TEST_CASE("dimensionally mismatched conversions are rejected") {
    CHECK_THROWS_AS(convert_unit(1.0, Unit::microtesla, Unit::hertz), std::invalid_argument);
    CHECK_THROWS_AS(convert_unit(1.0, Unit::kilovolt_per_cm, Unit::second), std::invalid_argument);
}

TEST_CASE("spherical to cartesian handles the reference directions") {
    SECTION("pole") {
        const auto v = spherical_to_cartesian({1.0, 0.0, 1.234});
        CHECK(v.x == 0.0);
        CHECK(v.y == 0.0);
        CHECK(v.z == 1.0);
    }
    SECTION("y axis, the dominant field direction") {
        const auto v = spherical_to_cartesian({1.0, std::numbers::pi / 2, std::numbers::pi / 2});
        CHECK_THAT(v.y, WithinRel(1.0, 1e-15));
        CHECK(std::abs(v.x) < 1e-15);
        CHECK(std::abs(v.z) < 1e-15);
    }
    SECTION("89 degree polar angle at 100 kV/cm") {
        const double m = 1e7;
        const double theta = 89.0 * std::numbers::pi / 180.0;
        const auto v = spherical_to_cartesian({m, theta, std::numbers::pi / 2});
        CHECK_THAT(v.y, WithinRel(0.9998476951563913 * m, 1e-12));
        CHECK_THAT(v.z, WithinRel(0.0174524064372835 * m, 1e-12));
        CHECK(std::abs(v.x) < 1e-8 * m);
    }
}

TEST_CASE("spherical round trip preserves magnitude") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> mag(0.0, 1e8);
    std::uniform_real_distribution<double> th(0.0, std::numbers::pi);
    std::uniform_real_distribution<double> ph(0.0, 2.0 * std::numbers::pi);
    for (int i = 0; i < 500; ++i) {
        const SphericalDirection dir{mag(rng), th(rng), ph(rng)};
        const auto v = spherical_to_cartesian(dir);
        if (dir.magnitude == 0.0) {
            CHECK(v.magnitude() == 0.0);
        } else {
            CHECK_THAT(v.magnitude(), WithinRel(dir.magnitude, 1e-12));
        }
        CHECK(v.perp() >= 0.0);
    }
}
