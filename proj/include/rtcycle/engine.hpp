#pragma once

// Couples the gas-turbine cycle with the nitrogen loop and the NO chain
// into a single engine evaluation, and sweeps one input axis for the
// trend studies.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "rtcycle/accessory_cycle.hpp"
#include "rtcycle/atmosphere.hpp"
#include "rtcycle/config.hpp"
#include "rtcycle/emissions.hpp"
#include "rtcycle/equilibrium.hpp"
#include "rtcycle/main_cycle.hpp"

namespace rtcycle {

// The seven swept design inputs.
struct CycleInput {
    double mach = 0.5;
    double alt_m = 4000.0;
    double rc1 = 10.0;
    double tit_K = 1500.0;
    double tf_t2 = 0.92;
    double cr = 7.0;
    double dt_cool_K = 50.0;

    bool within(const SweepEnvelope& env) const {
        return env.mach.contains(mach) && env.alt_m.contains(alt_m) && env.rc1.contains(rc1) &&
               env.tit_K.contains(tit_K) && env.tf_t2.contains(tf_t2) && env.cr.contains(cr) &&
               env.dt_cool_K.contains(dt_cool_K);
    }
};

struct PerformancePoint {
    CycleInput input;

    double power_out_kW = 0.0;      // W_net1 + W_net2
    double psfc_kg_kWh = 0.0;       // 3600 * m_f / P_out
    double psfc_kg_s_kW = 0.0;      // m_f / P_out
    double eta_thermal = 0.0;       // P_out / Q_h
    double mdot_no_kg_s = 0.0;
    double mdot_no2_kg_s = 0.0;
    double mdot_nox_kg_s = 0.0;

    // diagnostics
    double w_net1_kW = 0.0, w_net2_kW = 0.0;
    double w_c1_kW = 0.0, w_t1_kW = 0.0;
    double w_t2_kW = 0.0, w_t3_kW = 0.0, w_pc_kW = 0.0, w_pf_kW = 0.0;
    double q_h_kW = 0.0, q1_kW = 0.0, q2_kW = 0.0, q3_kW = 0.0;
    double mdot_air_kg_s = 0.0, mdot_fuel_kg_s = 0.0, mdot_turbine_kg_s = 0.0;
    double phi = 0.0;
    double sink_utilization = 0.0;
    AmbientState ambient{};
    GasStation st2{}, st3{}, st4{}, st5{}, st6{};
    CoolantStation c1{}, c2{}, c3{}, c4{}, c5{}, c6{};

    bool feasible = true;
    std::vector<std::string> flags;  // component names + reasons when infeasible
};

namespace detail {

inline constexpr int kCouplingMaxIter = 200;
inline constexpr double kCouplingTolK = 1e-6;
inline constexpr double kCouplingDamping = 0.5;

// The nitrogen loop does nothing when it gets no pressure boost, no
// extraction and no heat: short-circuit to an idle loop at the anchor state.
inline bool accessory_inert(const CycleInput& in, const EngineConfig& cfg) {
    return in.cr == 1.0 && in.tf_t2 == 1.0 && in.dt_cool_K == 0.0 &&
           cfg.hex2_effectiveness == 0.0;
}

} // namespace detail

inline PerformancePoint evaluate_cycle(const CycleInput& in, const EngineConfig& cfg,
                                       const KeqTable& keq = KeqTable::builtin()) {
    PerformancePoint pt;
    pt.input = in;

    auto flag_infeasible = [&pt](const infeasible_error& e) {
        pt.feasible = false;
        pt.flags.push_back(e.what());
    };

    // --- ambient and inlet -------------------------------------------------
    pt.ambient = ambient_conditions(in.alt_m);
    const double p1 = pt.ambient.pressure_kPa;
    try {
        pt.st2 = inlet_cooling(pt.ambient, in.dt_cool_K, cfg.t2_floor_K);
    } catch (const infeasible_error& e) {
        flag_infeasible(e);
        return pt;
    }
    const double rho2 =
        pt.st2.pressure_kPa * 1000.0 / (kGasConstAir * 1000.0 * pt.st2.temperature_K);
    const double velocity = flight_velocity(in.mach, pt.ambient);
    pt.mdot_air_kg_s = inlet_mass_flow(rho2, velocity, cfg.inlet_area_m2);
    pt.st2.mass_flow_kg_s = pt.mdot_air_kg_s;

    // --- compressor, burner, power turbine ---------------------------------
    const CompressorResult comp = compressor(pt.st2, in.rc1, cfg.eta_compressor);
    pt.st3 = comp.outlet;
    pt.w_c1_kW = comp.power_kW;

    CombustorResult burn;
    try {
        burn = combustor(pt.st3, in.tit_K, cfg.fuel_lhv_kJ_kg, cfg.eta_combustor,
                         cfg.dp_combustor_frac);
    } catch (const infeasible_error& e) {
        flag_infeasible(e);
        return pt;
    }
    pt.st4 = burn.outlet;
    pt.q_h_kW = burn.heat_rate_kW;
    pt.mdot_fuel_kg_s = burn.fuel_flow_kg_s;
    pt.mdot_turbine_kg_s = burn.outlet.mass_flow_kg_s;

    // open cycle: the exhaust leaves at ambient pressure, so the turbine
    // expands to the pressure that lands on P1 after the recuperator loss
    const double p5 = p1 / (1.0 - cfg.dp_recup_gas_frac);
    TurbineResult turb;
    try {
        turb = turbine1(pt.st4, p5, cfg.eta_turbine1);
    } catch (const infeasible_error& e) {
        flag_infeasible(e);
        return pt;
    }
    pt.st5 = turb.outlet;
    pt.w_t1_kW = turb.power_kW;
    pt.w_net1_kW = net_power_main(pt.w_t1_kW, pt.w_c1_kW);

    // --- nitrogen loop ------------------------------------------------------
    const double mdot_c = cfg.coolant_flow_kg_s;
    const double cp_c = cfg.n2_cp_kJ_kgK;
    const double k_c = cfg.n2_heat_ratio();
    const double dp_hex = cfg.dp_coolant_hex_frac * pt.st3.pressure_kPa;
    pt.q1_kW = pt.mdot_air_kg_s *
               mean_cp_air(pt.ambient.temperature_K, pt.st2.temperature_K) * in.dt_cool_K;

    const double t_c6 = n2_saturation_temperature(cfg.pc6_anchor_kPa, cfg.n2_saturation);
    pt.c6 = {t_c6, cfg.pc6_anchor_kPa, CoolantPhase::liquid};

    if (detail::accessory_inert(in, cfg)) {
        pt.c1 = pt.c2 = pt.c3 = pt.c4 = pt.c6;
        pt.c2.phase = pt.c3.phase = pt.c4.phase = CoolantPhase::vapor;
        pt.c5 = pt.c4;
        pt.st6 = recuperator_gas_side(pt.st5, 0.0, cfg.dp_recup_gas_frac, cfg.t6_floor_K);
    } else {
        try {
            const PumpResult pump = cooling_pump(pt.c6, in.cr, mdot_c, cfg.eta_cooling_pump,
                                                 cfg.liquid_n2_density_kg_m3,
                                                 cfg.liquid_n2_cp_kJ_kgK);
            pt.c1 = pump.outlet;
            pt.w_pc_kW = pump.power_kW;
            pt.c2 = hex1_cold_side(pt.c1, pt.q1_kW, mdot_c, cp_c, dp_hex,
                                   pt.st2.temperature_K);
            // turbine 2 extracts along a fixed design expansion line; the
            // swept temperature fraction varies the extraction only
            const double pf_design = isentropic_pressure_fraction(cfg.tf_t2_design, k_c);
            const CoolantTurbineResult t2 =
                turbine2(pt.c2, in.tf_t2, mdot_c, cp_c, k_c, cfg.eta_turbine2, pf_design);
            pt.c3 = t2.outlet;
            pt.w_t2_kW = t2.power_kW;

            // exhaust-recovery coupling: effectiveness model on whichever
            // stream has the smaller heat capacity, damped to a fixed point
            // because the gas-side cp depends on the unknown exit temperature
            double q2 = 0.0;
            double t6_prev = pt.st5.temperature_K;
            double t_c4_prev = pt.c3.temperature_K;
            bool converged = false;
            for (int i = 0; i < detail::kCouplingMaxIter; ++i) {
                const double cp_gas = mean_cp_air(pt.st5.temperature_K, t6_prev);
                const double cap_gas = pt.mdot_turbine_kg_s * cp_gas;
                const double cap_cold = mdot_c * cp_c;
                double q2_target = cfg.hex2_effectiveness * std::min(cap_gas, cap_cold) *
                                   (pt.st5.temperature_K - pt.c3.temperature_K);
                const double q2_floor_cap =
                    cap_gas * (pt.st5.temperature_K - cfg.t6_floor_K);
                q2_target = std::min(std::max(q2_target, 0.0), q2_floor_cap);
                q2 = q2 + detail::kCouplingDamping * (q2_target - q2);

                pt.st6 = recuperator_gas_side(pt.st5, q2, cfg.dp_recup_gas_frac,
                                              cfg.t6_floor_K);
                pt.c4 = hex2_cold_side(pt.c3, q2, mdot_c, cp_c, dp_hex,
                                       pt.st5.temperature_K);
                if (std::abs(pt.st6.temperature_K - t6_prev) < detail::kCouplingTolK &&
                    std::abs(pt.c4.temperature_K - t_c4_prev) < detail::kCouplingTolK) {
                    converged = true;
                    break;
                }
                t6_prev = pt.st6.temperature_K;
                t_c4_prev = pt.c4.temperature_K;
            }
            if (!converged)
                throw solver_error(
                    "evaluate_cycle: exhaust-recovery coupling did not converge (residual " +
                    std::to_string(std::abs(pt.st6.temperature_K - t6_prev)) + " K)");
            pt.q2_kW = q2;

            const double p_c5 = cfg.pc6_anchor_kPa + dp_hex;
            const CoolantTurbineResult t3 =
                turbine3(pt.c4, p_c5, mdot_c, cp_c, k_c, cfg.eta_turbine3);
            pt.c5 = t3.outlet;
            pt.w_t3_kW = t3.power_kW;

            const double sink_capacity =
                cfg.sink_cp_kJ_kgK * cfg.sink_dt_allow_K + cfg.sink_latent_kJ_kg;
            const CondenserResult cond =
                hex3_condenser(pt.c5, mdot_c, cp_c, dp_hex, pt.mdot_fuel_kg_s,
                               sink_capacity, cfg.n2_saturation);
            pt.c6 = cond.outlet;
            pt.q3_kW = cond.heat_rejected_kW;
            pt.sink_utilization = cond.sink_utilization;
            if (cfg.sink_enforce && pt.sink_utilization > 1.0) {
                throw infeasible_error("hex3_condenser",
                                       "fuel-side heat-sink utilization " +
                                           std::to_string(pt.sink_utilization) +
                                           " exceeds 1");
            }
        } catch (const infeasible_error& e) {
            flag_infeasible(e);
            return pt;
        }
    }

    pt.w_pf_kW = fuel_pump(pt.mdot_fuel_kg_s, cfg.fuel_p_in_kPa, cfg.fuel_p_out_kPa,
                           cfg.eta_fuel_pump, cfg.fuel_density_kg_m3);
    pt.w_net2_kW = net_power_accessory(pt.w_t2_kW, pt.w_t3_kW, pt.w_pc_kW, pt.w_pf_kW);

    // --- overall performance -------------------------------------------------
    pt.power_out_kW = pt.w_net1_kW + pt.w_net2_kW;
    if (pt.power_out_kW > 0.0) {
        pt.psfc_kg_s_kW = pt.mdot_fuel_kg_s / pt.power_out_kW;
        pt.psfc_kg_kWh = 3600.0 * pt.mdot_fuel_kg_s / pt.power_out_kW;
    }
    pt.eta_thermal = (pt.q_h_kW > 0.0) ? pt.power_out_kW / pt.q_h_kW : 0.0;
    if (!(pt.eta_thermal > 0.0 && pt.eta_thermal < 1.0)) {
        pt.feasible = false;
        pt.flags.push_back("performance: thermal efficiency " +
                           std::to_string(pt.eta_thermal) + " outside (0,1)");
    }

    // --- emissions ------------------------------------------------------------
    pt.phi = equivalence_ratio(pt.mdot_fuel_kg_s, pt.mdot_air_kg_s, cfg.far_stoich);
    CombustionState flame = product_composition(pt.st4.temperature_K, pt.st4.pressure_kPa,
                                                pt.phi, keq);
    const double no_total = integrate_no(flame, cfg.residence_time_s, cfg.dt_max_s);
    const auto [no_conc, no2_conc] = partition_no2(no_total, cfg.no2_fraction);
    flame.conc[spNO] = no_conc;
    flame.conc[spNO2] = no2_conc;
    // the formed oxides draw their atoms from the N2/O2 pool, keeping the
    // mixture mass and the atom inventory closed
    flame.conc[spN2] -= 0.5 * (no_conc + no2_conc);
    flame.conc[spO2] -= 0.5 * no_conc + no2_conc;
    const EmissionResult em = species_mass_flows(flame, pt.mdot_turbine_kg_s);
    pt.mdot_no_kg_s = em.mdot_no_kg_s;
    pt.mdot_no2_kg_s = em.mdot_no2_kg_s;
    pt.mdot_nox_kg_s = em.mdot_nox_kg_s;

    return pt;
}

// One row of a trend table: the value swept along the axis plus the point.
struct TrendRow {
    double axis_value = 0.0;
    PerformancePoint point;
};

enum class TrendAxis { mach, alt, rc1, tit, tf_t2, cr, dt_cool };

inline TrendAxis trend_axis_from_name(const std::string& name) {
    if (name == "mach") return TrendAxis::mach;
    if (name == "alt") return TrendAxis::alt;
    if (name == "rc1") return TrendAxis::rc1;
    if (name == "tit") return TrendAxis::tit;
    if (name == "tf_t2") return TrendAxis::tf_t2;
    if (name == "cr") return TrendAxis::cr;
    if (name == "dt_cool") return TrendAxis::dt_cool;
    throw domain_error("unknown trend axis '" + name + "'");
}

inline const char* trend_axis_name(TrendAxis axis) {
    switch (axis) {
        case TrendAxis::mach: return "mach";
        case TrendAxis::alt: return "alt";
        case TrendAxis::rc1: return "rc1";
        case TrendAxis::tit: return "tit";
        case TrendAxis::tf_t2: return "tf_t2";
        case TrendAxis::cr: return "cr";
        case TrendAxis::dt_cool: return "dt_cool";
    }
    return "?";
}

inline CycleInput with_axis_value(CycleInput base, TrendAxis axis, double value) {
    switch (axis) {
        case TrendAxis::mach: base.mach = value; break;
        case TrendAxis::alt: base.alt_m = value; break;
        case TrendAxis::rc1: base.rc1 = value; break;
        case TrendAxis::tit: base.tit_K = value; break;
        case TrendAxis::tf_t2: base.tf_t2 = value; break;
        case TrendAxis::cr: base.cr = value; break;
        case TrendAxis::dt_cool: base.dt_cool_K = value; break;
    }
    return base;
}

// Evaluates `fn` for indices [0, n) across `threads` workers; results land
// in index order, so the output is deterministic regardless of scheduling.
inline void parallel_index_for(std::size_t n, unsigned threads,
                               const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::size_t per = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t begin = t * per;
        const std::size_t end = std::min(n, begin + per);
        if (begin >= end) break;
        pool.emplace_back([begin, end, &fn] {
            for (std::size_t i = begin; i < end; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

// Sweeps one input axis over [lo, hi] with n evenly spaced points, holding
// the remaining inputs at `base`. Infeasible points are flagged, not dropped.
inline std::vector<TrendRow> trend_study(TrendAxis axis, double lo, double hi, int n_points,
                                         const CycleInput& base, const EngineConfig& cfg,
                                         const KeqTable& keq = KeqTable::builtin(),
                                         unsigned threads = 1) {
    if (n_points < 2) throw domain_error("trend_study: need at least 2 points");
    std::vector<TrendRow> rows(static_cast<std::size_t>(n_points));
    parallel_index_for(rows.size(), threads, [&](std::size_t i) {
        const double v = lo + (hi - lo) * static_cast<double>(i) /
                                  static_cast<double>(n_points - 1);
        rows[i].axis_value = v;
        rows[i].point = evaluate_cycle(with_axis_value(base, axis, v), cfg, keq);
    });
    return rows;
}

} // namespace rtcycle
