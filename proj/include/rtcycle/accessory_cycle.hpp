#pragma once

// Closed nitrogen loop (stations c1..c6): feed pump, inlet-air chiller cold
// side, turbine 2, exhaust-recovery cold side, turbine 3 and the condenser
// rejecting to the cryogenic fuel stream. The pump-inlet pressure is the
// loop anchor; turbine 3 expands down to whatever pressure closes the chain
// back onto that anchor.
//
// Nitrogen vapour is modelled with a constant cp; temperatures in K,
// pressures in kPa, powers in kW.

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "rtcycle/atmosphere.hpp"
#include "rtcycle/errors.hpp"

namespace rtcycle {

enum class CoolantPhase { liquid, vapor };

struct CoolantStation {
    double temperature_K = 0.0;
    double pressure_kPa = 0.0;
    CoolantPhase phase = CoolantPhase::vapor;
};

struct PumpResult {
    CoolantStation outlet;  // station c1
    double power_kW = 0.0;  // consumed
};

struct CoolantTurbineResult {
    CoolantStation outlet;
    double power_kW = 0.0;  // produced
};

struct CondenserResult {
    CoolantStation outlet;       // station c6, saturated liquid
    double heat_rejected_kW = 0.0;  // Q3
    double sink_utilization = 0.0;  // Q3 / fuel-side absorption capacity
};

// Feed pump: raises the loop pressure by the compression ratio CR.
// inlet_c6 must be saturated liquid at the anchor pressure.
inline PumpResult cooling_pump(const CoolantStation& inlet_c6, double cr, double mdot_c,
                               double eta_pc, double liquid_density, double liquid_cp) {
    if (cr < 1.0) throw domain_error("cooling_pump: CR must be >= 1");
    if (!(eta_pc > 0.0 && eta_pc <= 1.0)) throw domain_error("cooling_pump: eta must be in (0,1]");
    if (!(liquid_density > 0.0)) throw domain_error("cooling_pump: density must be > 0");

    PumpResult r;
    r.power_kW = mdot_c * inlet_c6.pressure_kPa * (cr - 1.0) / (eta_pc * liquid_density);
    const double dT = (mdot_c > 0.0) ? r.power_kW / (mdot_c * liquid_cp) : 0.0;
    r.outlet = {inlet_c6.temperature_K + dT, cr * inlet_c6.pressure_kPa, CoolantPhase::liquid};
    return r;
}

// Cold side of the inlet-air chiller: absorbs Q1 and must stay colder than
// the chilled-air stream it serves.
inline CoolantStation hex1_cold_side(const CoolantStation& c1, double q1_kW, double mdot_c,
                                     double cp_c, double dp_kPa, double air_t2_K) {
    if (q1_kW < 0.0) throw domain_error("hex1_cold_side: Q1 must be >= 0");
    if (q1_kW > 0.0 && !(mdot_c * cp_c > 0.0))
        throw domain_error("hex1_cold_side: nonzero duty needs positive coolant capacity");
    const double dT = (q1_kW > 0.0) ? q1_kW / (mdot_c * cp_c) : 0.0;
    const double t_c2 = c1.temperature_K + dT;
    if (t_c2 >= air_t2_K) {
        throw infeasible_error("hex1_cold_side",
                               "coolant exit " + std::to_string(t_c2) +
                                   " K would reach the chilled-air temperature " +
                                   std::to_string(air_t2_K) + " K (pinch violation)");
    }
    return {t_c2, c1.pressure_kPa - dp_kPa, CoolantPhase::vapor};
}

// Isentropic pressure fraction matching a temperature fraction tf at heat
// ratio k: the expansion-line map p_out/p_in = tf^(k/(k-1)).
inline double isentropic_pressure_fraction(double tf, double k) {
    return std::pow(tf, k / (k - 1.0));
}

// Turbine 2, specified by its temperature fraction. When no pressure
// fraction is supplied the exit pressure follows the isentropic map at the
// same tf; a caller may instead pin the expansion line to a design-point
// pressure fraction and sweep tf as pure extraction.
inline CoolantTurbineResult turbine2(const CoolantStation& c2, double tf_t2, double mdot_c,
                                     double cp_c, double k_c, double eta,
                                     std::optional<double> pressure_fraction = std::nullopt) {
    if (!(tf_t2 > 0.0 && tf_t2 <= 1.0)) throw domain_error("turbine2: tf must be in (0,1]");
    if (!(eta > 0.0 && eta <= 1.0)) throw domain_error("turbine2: eta must be in (0,1]");
    const double pf = pressure_fraction.value_or(isentropic_pressure_fraction(tf_t2, k_c));
    if (!(pf > 0.0 && pf <= 1.0)) throw domain_error("turbine2: pressure fraction must be in (0,1]");

    CoolantTurbineResult r;
    const double t_c3 = tf_t2 * c2.temperature_K;
    r.outlet = {t_c3, pf * c2.pressure_kPa, CoolantPhase::vapor};
    r.power_kW = eta * mdot_c * cp_c * (c2.temperature_K - t_c3);
    return r;
}

// Cold side of the exhaust-recovery exchanger: absorbs Q2, must stay colder
// than the gas-side inlet.
inline CoolantStation hex2_cold_side(const CoolantStation& c3, double q2_kW, double mdot_c,
                                     double cp_c, double dp_kPa, double gas_t5_K) {
    if (q2_kW < 0.0) throw domain_error("hex2_cold_side: Q2 must be >= 0");
    if (q2_kW > 0.0 && !(mdot_c * cp_c > 0.0))
        throw domain_error("hex2_cold_side: nonzero duty needs positive coolant capacity");
    const double dT = (q2_kW > 0.0) ? q2_kW / (mdot_c * cp_c) : 0.0;
    const double t_c4 = c3.temperature_K + dT;
    if (t_c4 >= gas_t5_K) {
        throw infeasible_error("hex2_cold_side",
                               "coolant exit " + std::to_string(t_c4) +
                                   " K would reach the exhaust-gas inlet " +
                                   std::to_string(gas_t5_K) + " K (pinch violation)");
    }
    return {t_c4, c3.pressure_kPa - dp_kPa, CoolantPhase::vapor};
}

// Turbine 3: expands to the target exit pressure that closes the loop.
inline CoolantTurbineResult turbine3(const CoolantStation& c4, double p_c5_kPa,
                                     double mdot_c, double cp_c, double k_c, double eta) {
    if (p_c5_kPa >= c4.pressure_kPa)
        throw infeasible_error("turbine3", "exit pressure " + std::to_string(p_c5_kPa) +
                                               " kPa not below inlet " +
                                               std::to_string(c4.pressure_kPa) + " kPa");
    if (!(eta > 0.0 && eta <= 1.0)) throw domain_error("turbine3: eta must be in (0,1]");

    const double t_ideal =
        c4.temperature_K * std::pow(p_c5_kPa / c4.pressure_kPa, (k_c - 1.0) / k_c);
    const double t_c5 = c4.temperature_K - eta * (c4.temperature_K - t_ideal);
    CoolantTurbineResult r;
    r.outlet = {t_c5, p_c5_kPa, CoolantPhase::vapor};
    r.power_kW = mdot_c * cp_c * (c4.temperature_K - t_c5);
    return r;
}

// Condenser: cools the vapour to saturation at the downstream pressure and
// rejects the heat into the fuel stream. sink_capacity_kJ_kg is the
// absorbable heat per kg of fuel; enforcement of utilization <= 1 is the
// caller's policy.
inline CondenserResult hex3_condenser(const CoolantStation& c5, double mdot_c, double cp_c,
                                      double dp_kPa, double fuel_flow_kg_s,
                                      double sink_capacity_kJ_kg,
                                      const N2SaturationCoeffs& sat = {}) {
    const double p_c6 = c5.pressure_kPa - dp_kPa;
    const double t_c6 = n2_saturation_temperature(p_c6, sat);
    if (c5.temperature_K < t_c6) {
        throw infeasible_error("hex3_condenser",
                               "vapour at " + std::to_string(c5.temperature_K) +
                                   " K is below the " + std::to_string(t_c6) +
                                   " K condensation temperature");
    }
    CondenserResult r;
    r.heat_rejected_kW = mdot_c * cp_c * (c5.temperature_K - t_c6);
    const double capacity_kW = fuel_flow_kg_s * sink_capacity_kJ_kg;
    r.sink_utilization = (r.heat_rejected_kW > 0.0)
                             ? (capacity_kW > 0.0
                                    ? r.heat_rejected_kW / capacity_kW
                                    : std::numeric_limits<double>::infinity())
                             : 0.0;
    r.outlet = {t_c6, p_c6, CoolantPhase::liquid};
    return r;
}

// Fuel feed pump.
inline double fuel_pump(double fuel_flow_kg_s, double p_in_kPa, double p_out_kPa,
                        double eta_pf, double fuel_density) {
    if (p_out_kPa < p_in_kPa) throw domain_error("fuel_pump: outlet pressure below inlet");
    if (!(eta_pf > 0.0 && eta_pf <= 1.0)) throw domain_error("fuel_pump: eta must be in (0,1]");
    if (!(fuel_density > 0.0)) throw domain_error("fuel_pump: density must be > 0");
    return fuel_flow_kg_s * (p_out_kPa - p_in_kPa) / (eta_pf * fuel_density);
}

inline double net_power_accessory(double w_t2, double w_t3, double w_pc, double w_pf) {
    return w_t2 + w_t3 - w_pc - w_pf;
}

} // namespace rtcycle
