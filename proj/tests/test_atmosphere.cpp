#include <catch_amalgamated.hpp>

#include <cmath>

#include "rtcycle/atmosphere.hpp"

using namespace rtcycle;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("standard atmosphere matches the published sea-level state") {
    const AmbientState amb = ambient_conditions(0.0);
    CHECK(amb.temperature_K == 288.15);
    CHECK(amb.pressure_kPa == 101.325);
    CHECK_THAT(amb.density_kg_m3, WithinAbs(1.225, 1.5e-3));
    // the ideal-gas tie between the fields holds to round-off
    CHECK_THAT(amb.density_kg_m3,
               WithinRel(amb.pressure_kPa * 1000.0 / (287.0 * amb.temperature_K), 1e-9));
}

TEST_CASE("standard atmosphere at 4 km and at the tropopause") {
    const AmbientState a4 = ambient_conditions(4000.0);
    CHECK_THAT(a4.temperature_K, WithinAbs(262.15, 1e-9));
    CHECK_THAT(a4.pressure_kPa, WithinAbs(61.64, 0.02));
    CHECK_THAT(a4.density_kg_m3, WithinAbs(0.819, 1e-3));

    const AmbientState a11 = ambient_conditions(11000.0);
    CHECK_THAT(a11.temperature_K, WithinAbs(216.65, 1e-9));
}

TEST_CASE("temperature and pressure are continuous at the tropopause") {
    const AmbientState below = ambient_conditions(11000.0 - 1e-6);
    const AmbientState above = ambient_conditions(11000.0 + 1e-6);
    CHECK_THAT(above.temperature_K, WithinRel(below.temperature_K, 1e-6));
    CHECK_THAT(above.pressure_kPa, WithinRel(below.pressure_kPa, 1e-6));
}

TEST_CASE("altitude outside the supported band is rejected") {
    CHECK_THROWS_AS(ambient_conditions(-1.0), domain_error);
    CHECK_THROWS_AS(ambient_conditions(20001.0), domain_error);
}

TEST_CASE("cp polynomial values") {
    // limit of the polynomial at T -> 0 is the constant term
    CHECK(0.99963438 == detail::kCpAirA1);
    // independent evaluation with explicit powers
    auto poly = [](double T) {
        return 0.99963438 - 0.055205312e-3 * T + 0.346320281e-6 * T * T -
               0.140118997e-9 * T * T * T;
    };
    CHECK_THAT(cp_air(300.0), WithinRel(poly(300.0), 1e-12));
    CHECK_THAT(cp_air(1000.0), WithinRel(poly(1000.0), 1e-12));
    CHECK_THAT(cp_air(300.0), WithinAbs(1.0105, 5e-5));
    CHECK_THAT(cp_air(1000.0), WithinAbs(1.1506, 5e-5));
    CHECK_THROWS_AS(cp_air(150.0), domain_error);
    CHECK_THROWS_AS(cp_air(2600.0), domain_error);
}

TEST_CASE("mean cp is cp at the midpoint") {
    CHECK(mean_cp_air(300.0, 300.0) == cp_air(300.0));
    CHECK(mean_cp_air(300.0, 500.0) == cp_air(400.0));
    CHECK_THAT(mean_cp_air(600.0, 1400.0), WithinAbs(1.1506, 5e-5));
}

TEST_CASE("heat ratio of air") {
    CHECK_THAT(k_air(300.0), WithinAbs(1.3967, 2e-4));
    CHECK_THAT(k_air(1000.0), WithinAbs(1.3323, 2e-4));
    CHECK_THAT(k_air(300.0), WithinRel(cp_air(300.0) / (cp_air(300.0) - 0.287), 1e-12));

    const GasProps props = air_props(700.0);
    CHECK(props.cp_kJ_kgK == cp_air(700.0));
    CHECK(props.heat_ratio == props.cp_kJ_kgK / (props.cp_kJ_kgK - props.gas_const_kJ_kgK));
    CHECK(props.cp_kJ_kgK > props.gas_const_kJ_kgK);
}

TEST_CASE("cp is monotone on the rising branch of the cubic") {
    // the cubic turns over near 1564 K, so monotonicity is checked below it
    double prev = cp_air(250.0);
    for (double T = 251.0; T <= 1550.0; T += 1.0) {
        const double cur = cp_air(T);
        REQUIRE(cur > prev);
        prev = cur;
    }
}

TEST_CASE("heat-ratio bounds across the validity window") {
    // tight classical bound up to 2300 K, looser sanity bound to the edge of
    // the window where the cubic has turned over
    for (double T = 200.0; T <= 2300.0; T += 10.0) {
        const double k = k_air(T);
        REQUIRE(k > 1.0);
        REQUIRE(k < 1.41);
    }
    for (double T = 2300.0; T <= 2500.0; T += 10.0) {
        const double k = k_air(T);
        REQUIRE(k > 1.0);
        REQUIRE(k < 1.55);
    }
}

TEST_CASE("flight velocity") {
    const AmbientState sl = ambient_conditions(0.0);
    CHECK(flight_velocity(0.0, sl) == 0.0);
    CHECK_THAT(flight_velocity(1.0, sl), WithinRel(340.3, 5e-3));
    CHECK_THAT(flight_velocity(1.0, sl),
               WithinRel(std::sqrt(k_air(288.15) * 287.0 * 288.15), 1e-12));

    const AmbientState a4 = ambient_conditions(4000.0);
    CHECK_THAT(flight_velocity(0.5, a4),
               WithinRel(0.5 * std::sqrt(k_air(262.15) * 287.0 * 262.15), 1e-12));
    CHECK_THROWS_AS(flight_velocity(-0.1, sl), domain_error);
}

TEST_CASE("nitrogen saturation temperature") {
    CHECK_THAT(n2_saturation_temperature(101.325), WithinAbs(77.36, 0.05));
    CHECK_THAT(n2_saturation_temperature(500.0), WithinAbs(94.0, 1.0));
    CHECK_THROWS_AS(n2_saturation_temperature(10.0), domain_error);
    CHECK_THROWS_AS(n2_saturation_temperature(3500.0), domain_error);  // supercritical
}

TEST_CASE("nitrogen saturation temperature is strictly increasing") {
    double prev = n2_saturation_temperature(20.0);
    for (double P = 30.0; P <= 3000.0; P += 10.0) {
        const double cur = n2_saturation_temperature(P);
        REQUIRE(cur > prev);
        prev = cur;
    }
}
