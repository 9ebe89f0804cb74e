#pragma once

// Ambient flight conditions (ICAO standard atmosphere) and temperature
// dependent gas properties for air, nitrogen and hydrogen.

#include <cmath>
#include <string>

#include "rtcycle/errors.hpp"

namespace rtcycle {

// Air treated as an ideal gas throughout.
inline constexpr double kGasConstAir = 0.287;     // kJ/kg-K
inline constexpr double kUniversalGasConst = 8.31446; // kJ/kmol-K
inline constexpr double kGasConstN2 = kUniversalGasConst / 28.0134; // kJ/kg-K

struct AmbientState {
    double temperature_K = 0.0;   // static temperature T1
    double pressure_kPa = 0.0;    // static pressure P1
    double density_kg_m3 = 0.0;
    double sound_speed_m_s = 0.0;
};

struct GasProps {
    double cp_kJ_kgK = 0.0;
    double heat_ratio = 0.0;      // cp / (cp - R)
    double gas_const_kJ_kgK = 0.0;
};

namespace detail {

// cp(T) = a1 + a2 T + a3 T^2 + a4 T^3, kJ/kg-K.
inline constexpr double kCpAirA1 = 0.99963438;
inline constexpr double kCpAirA2 = -0.055205312e-3;
inline constexpr double kCpAirA3 = 0.346320281e-6;
inline constexpr double kCpAirA4 = -0.140118997e-9;

inline constexpr double kCpAirTmin = 200.0;   // K
inline constexpr double kCpAirTmax = 2500.0;  // K, the cubic turns over above
                                              // ~1564 K so extrapolation past
                                              // the window is rejected, not
                                              // silently evaluated

// ICAO standard atmosphere, troposphere + lower stratosphere.
inline constexpr double kIsaSeaLevelT = 288.15;    // K
inline constexpr double kIsaSeaLevelP = 101.325;   // kPa
inline constexpr double kIsaLapse = 0.0065;        // K/m
inline constexpr double kIsaTropopause = 11000.0;  // m
inline constexpr double kGravity = 9.80665;        // m/s^2

} // namespace detail

// Heat capacity of air at constant pressure, kJ/kg-K. Valid 200..2500 K.
inline double cp_air(double T) {
    if (!(T >= detail::kCpAirTmin && T <= detail::kCpAirTmax)) {
        throw domain_error("cp_air: T=" + std::to_string(T) +
                           " K outside [200, 2500] K validity window");
    }
    using namespace detail;
    return kCpAirA1 + T * (kCpAirA2 + T * (kCpAirA3 + T * kCpAirA4));
}

// cp evaluated at the arithmetic mean of two temperatures.
inline double mean_cp_air(double T_a, double T_b) {
    return cp_air(0.5 * (T_a + T_b));
}

// Ratio of specific heats for air at temperature T.
inline double k_air(double T) {
    const double cp = cp_air(T);
    return cp / (cp - kGasConstAir);
}

inline GasProps air_props(double T) {
    const double cp = cp_air(T);
    return {cp, cp / (cp - kGasConstAir), kGasConstAir};
}

// Standard-atmosphere state at geometric altitude H [m], 0..20000 m.
inline AmbientState ambient_conditions(double altitude_m) {
    using namespace detail;
    if (!(altitude_m >= 0.0 && altitude_m <= 20000.0)) {
        throw domain_error("ambient_conditions: altitude " +
                           std::to_string(altitude_m) + " m outside [0, 20000] m");
    }
    const double exponent = kGravity / (kGasConstAir * 1000.0 * kIsaLapse);
    double T = 0.0;
    double P = 0.0;
    if (altitude_m <= kIsaTropopause) {
        T = kIsaSeaLevelT - kIsaLapse * altitude_m;
        P = kIsaSeaLevelP * std::pow(T / kIsaSeaLevelT, exponent);
    } else {
        const double T11 = kIsaSeaLevelT - kIsaLapse * kIsaTropopause;
        const double P11 = kIsaSeaLevelP * std::pow(T11 / kIsaSeaLevelT, exponent);
        T = T11;
        P = P11 * std::exp(-kGravity * (altitude_m - kIsaTropopause) /
                           (kGasConstAir * 1000.0 * T11));
    }
    AmbientState amb;
    amb.temperature_K = T;
    amb.pressure_kPa = P;
    amb.density_kg_m3 = P * 1000.0 / (kGasConstAir * 1000.0 * T);
    amb.sound_speed_m_s = std::sqrt(k_air(T) * kGasConstAir * 1000.0 * T);
    return amb;
}

// Flight velocity from Mach number and local sound speed.
inline double flight_velocity(double mach, const AmbientState& amb) {
    if (mach < 0.0) throw domain_error("flight_velocity: Mach < 0");
    return mach * amb.sound_speed_m_s;
}

// Antoine-form nitrogen saturation curve, ln(P[kPa]) = A - B/(T + C).
// Coefficients fitted to the published saturation line through the triple
// point (63.151 K, 12.523 kPa), the normal boiling point (77.355 K,
// 101.325 kPa) and 90 K / 360.4 kPa.
struct N2SaturationCoeffs {
    double a = 13.083271677699;
    double b = 607.038491202864;
    double c = -5.642902997633;
};

// Saturation (boiling) temperature of nitrogen at pressure P [kPa].
// Valid 20..3000 kPa, comfortably below the 3395.8 kPa critical point.
inline double n2_saturation_temperature(double pressure_kPa,
                                        const N2SaturationCoeffs& cf = {}) {
    if (!(pressure_kPa >= 20.0 && pressure_kPa <= 3000.0)) {
        throw domain_error("n2_saturation_temperature: P=" +
                           std::to_string(pressure_kPa) +
                           " kPa outside [20, 3000] kPa correlation range");
    }
    return cf.b / (cf.a - std::log(pressure_kPa)) - cf.c;
}

} // namespace rtcycle
