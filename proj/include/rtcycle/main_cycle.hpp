#pragma once

// Stations 1-6 of the open gas-turbine cycle: inlet chiller, compressor,
// burner, power turbine and the gas side of the exhaust heat exchanger.
// All temperatures are total temperatures in K, pressures in kPa, powers
// in kW. cp and the heat ratio are evaluated at the arithmetic mean
// temperature of each process, iterated to a fixed point where the end
// temperature is unknown.

#include <cmath>
#include <string>

#include "rtcycle/atmosphere.hpp"
#include "rtcycle/errors.hpp"

namespace rtcycle {

struct GasStation {
    double temperature_K = 0.0;
    double pressure_kPa = 0.0;
    double mass_flow_kg_s = 0.0;
};

struct CompressorResult {
    GasStation outlet;      // station 3
    double power_kW = 0.0;  // consumed
    double cp_mean_kJ_kgK = 0.0;
};

struct CombustorResult {
    GasStation outlet;          // station 4
    double heat_rate_kW = 0.0;  // Q_h
    double fuel_flow_kg_s = 0.0;
};

struct TurbineResult {
    GasStation outlet;      // station 5
    double power_kW = 0.0;  // produced
    double cp_mean_kJ_kgK = 0.0;
};

inline constexpr int kStationSolveMaxIter = 100;
inline constexpr double kStationSolveTolK = 1e-6;

// Inlet chiller, air side: isobaric temperature drop of dT_cool.
inline GasStation inlet_cooling(const AmbientState& amb, double dt_cool_K,
                                double t2_floor_K = 150.0) {
    if (dt_cool_K < 0.0) throw domain_error("inlet_cooling: dT_cool must be >= 0");
    const double t2 = amb.temperature_K - dt_cool_K;
    if (t2 <= t2_floor_K) {
        throw infeasible_error("inlet_cooling",
                               "cooled inlet temperature " + std::to_string(t2) +
                                   " K at or below the " + std::to_string(t2_floor_K) +
                                   " K floor");
    }
    return {t2, amb.pressure_kPa, 0.0};
}

inline double inlet_mass_flow(double density_kg_m3, double velocity_m_s, double area_m2) {
    if (density_kg_m3 < 0.0 || velocity_m_s < 0.0 || area_m2 < 0.0)
        throw domain_error("inlet_mass_flow: negative input");
    return density_kg_m3 * velocity_m_s * area_m2;
}

// Core isentropic-with-efficiency compression relation at a fixed heat ratio.
inline double compressor_exit_temperature(double t_in_K, double pressure_ratio,
                                          double eta, double k) {
    return t_in_K * (1.0 + (std::pow(pressure_ratio, (k - 1.0) / k) - 1.0) / eta);
}

// Compressor: pressure ratio rc1, isentropic efficiency eta. The heat ratio
// is iterated on the mean of inlet and outlet temperature.
inline CompressorResult compressor(const GasStation& st2, double rc1, double eta) {
    if (rc1 < 1.0) throw domain_error("compressor: pressure ratio must be >= 1");
    if (!(eta > 0.0 && eta <= 1.0)) throw domain_error("compressor: eta must be in (0,1]");

    // seed with a constant-k estimate so the first mean temperature already
    // sits inside the cp validity window even for deeply chilled inlets
    double t3 = compressor_exit_temperature(st2.temperature_K, rc1, eta, 1.4);
    for (int i = 0; i < kStationSolveMaxIter; ++i) {
        const double k = k_air(0.5 * (st2.temperature_K + t3));
        const double next = compressor_exit_temperature(st2.temperature_K, rc1, eta, k);
        if (std::abs(next - t3) < kStationSolveTolK) {
            t3 = next;
            const double cp = mean_cp_air(st2.temperature_K, t3);
            CompressorResult r;
            r.outlet = {t3, rc1 * st2.pressure_kPa, st2.mass_flow_kg_s};
            r.cp_mean_kJ_kgK = cp;
            r.power_kW = st2.mass_flow_kg_s * cp * (t3 - st2.temperature_K);
            return r;
        }
        t3 = next;
    }
    throw solver_error("compressor: exit-temperature fixed point did not converge");
}

// Burner: heats the air stream from T3 to the turbine inlet temperature.
inline CombustorResult combustor(const GasStation& st3, double tit_K, double lhv_kJ_kg,
                                 double eta_comb, double dp_frac) {
    if (!(eta_comb > 0.0 && eta_comb <= 1.0))
        throw domain_error("combustor: eta must be in (0,1]");
    if (tit_K < st3.temperature_K)
        throw infeasible_error("combustor", "turbine inlet temperature " +
                                                std::to_string(tit_K) +
                                                " K below compressor exit " +
                                                std::to_string(st3.temperature_K) + " K");
    const double cp = mean_cp_air(st3.temperature_K, tit_K);
    const double q_h = st3.mass_flow_kg_s * cp * (tit_K - st3.temperature_K);
    const double m_f = q_h / (lhv_kJ_kg * eta_comb);
    CombustorResult r;
    r.outlet = {tit_K, st3.pressure_kPa * (1.0 - dp_frac), st3.mass_flow_kg_s + m_f};
    r.heat_rate_kW = q_h;
    r.fuel_flow_kg_s = m_f;
    return r;
}

// Power turbine: expands from station 4 to the target exit pressure.
// Ideal exit temperature from the isentropic relation with the heat ratio at
// the mean of inlet and actual outlet temperature; the actual drop is the
// ideal drop scaled by the isentropic efficiency.
inline TurbineResult turbine1(const GasStation& st4, double p5_kPa, double eta) {
    if (p5_kPa > st4.pressure_kPa)
        throw infeasible_error("turbine1", "exit pressure " + std::to_string(p5_kPa) +
                                               " kPa above inlet " +
                                               std::to_string(st4.pressure_kPa) + " kPa");
    if (!(eta > 0.0 && eta <= 1.0)) throw domain_error("turbine1: eta must be in (0,1]");

    const double ratio = p5_kPa / st4.pressure_kPa;
    double t5 = st4.temperature_K;
    for (int i = 0; i < kStationSolveMaxIter; ++i) {
        const double k = k_air(0.5 * (st4.temperature_K + t5));
        const double t5_ideal = st4.temperature_K * std::pow(ratio, (k - 1.0) / k);
        const double next = st4.temperature_K - eta * (st4.temperature_K - t5_ideal);
        if (std::abs(next - t5) < kStationSolveTolK) {
            t5 = next;
            const double cp = mean_cp_air(st4.temperature_K, t5);
            TurbineResult r;
            r.outlet = {t5, p5_kPa, st4.mass_flow_kg_s};
            r.cp_mean_kJ_kgK = cp;
            r.power_kW = st4.mass_flow_kg_s * cp * (st4.temperature_K - t5);
            return r;
        }
        t5 = next;
    }
    throw solver_error("turbine1: exit-temperature fixed point did not converge");
}

// Gas side of heat exchanger 2: removes the duty Q2 from the exhaust stream.
inline GasStation recuperator_gas_side(const GasStation& st5, double q2_kW,
                                       double dp_frac, double t6_floor_K = 200.0) {
    if (q2_kW < 0.0) throw domain_error("recuperator_gas_side: Q2 must be >= 0");
    if (q2_kW == 0.0)
        return {st5.temperature_K, st5.pressure_kPa * (1.0 - dp_frac), st5.mass_flow_kg_s};
    const double mdot = st5.mass_flow_kg_s;
    const double q_max = mdot * mean_cp_air(st5.temperature_K,
                                            std::max(t6_floor_K, detail::kCpAirTmin)) *
                         (st5.temperature_K - t6_floor_K);
    if (q2_kW > q_max)
        throw infeasible_error("recuperator_gas_side",
                               "duty " + std::to_string(q2_kW) +
                                   " kW exceeds available exhaust enthalpy above the " +
                                   std::to_string(t6_floor_K) + " K floor");
    double t6 = st5.temperature_K;
    for (int i = 0; i < kStationSolveMaxIter; ++i) {
        const double cp = mean_cp_air(st5.temperature_K, t6);
        const double next = st5.temperature_K - q2_kW / (mdot * cp);
        if (std::abs(next - t6) < kStationSolveTolK)
            return {next, st5.pressure_kPa * (1.0 - dp_frac), mdot};
        t6 = next;
    }
    throw solver_error("recuperator_gas_side: exit-temperature fixed point did not converge");
}

inline double net_power_main(double w_t1_kW, double w_c1_kW) {
    return w_t1_kW - w_c1_kW;
}

} // namespace rtcycle
