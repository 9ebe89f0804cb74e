#pragma once

// Thermal-NO kinetics: the three-reaction mechanism
//   O + N2 <-> NO + N     (k1f / k1b)
//   N + O2 <-> NO + O     (k2f / k2b)
//   N + OH <-> NO + H     (k3f / k3b)
// integrated over the combustor residence time with atomic nitrogen in
// quasi-steady state and the radical pool frozen, then the small NO2 split
// and the exhaust species mass flows.

#include <cmath>
#include <string>
#include <utility>

#include "rtcycle/equilibrium.hpp"
#include "rtcycle/errors.hpp"

namespace rtcycle {

// Arrhenius rate constants, m^3/kmol-s.
struct ZeldovichRates {
    double k1f = 0.0, k1b = 0.0;
    double k2f = 0.0, k2b = 0.0;
    double k3f = 0.0, k3b = 0.0;
};

inline ZeldovichRates zeldovich_rates(double T) {
    if (!(T > 0.0)) throw domain_error("zeldovich_rates: T must be > 0");
    ZeldovichRates r;
    r.k1f = 1.8e14 * std::exp(-38370.0 / T);
    r.k1b = 1.8e14 * std::exp(-425.0 / T);
    r.k2f = 1.8e14 * std::exp(-4680.0 / T);
    r.k2b = 1.8e14 * std::exp(-20820.0 / T);
    r.k3f = 7.1e13 * std::exp(-450.0 / T);
    r.k3b = 1.7e14 * std::exp(-24560.0 / T);
    return r;
}

// Thermal-equilibrium NO level implied by reactions 1 and 2 alone
// (N2 + O2 <-> 2 NO with K = k1f k2f / (k1b k2b)).
inline double equilibrium_no(const ZeldovichRates& k, double c_n2, double c_o2) {
    const double keq = (k.k1f * k.k2f) / (k.k1b * k.k2b);
    return std::sqrt(std::max(0.0, keq * c_n2 * c_o2));
}

namespace detail {

// d[NO]/dt with [N] in quasi-steady state over the frozen pool.
inline double no_rate(const ZeldovichRates& k, const CombustionState& s, double no) {
    const double denom = k.k1b * no + k.k2f * s.conc[spO2] + k.k3f * s.conc[spOH];
    const double n_ss =
        denom > 0.0
            ? (k.k1f * s.conc[spO] * s.conc[spN2] + k.k2b * no * s.conc[spO] +
               k.k3b * no * s.conc[spH]) /
                  denom
            : 0.0;
    return k.k1f * s.conc[spO] * s.conc[spN2] - k.k1b * no * n_ss +
           k.k2f * n_ss * s.conc[spO2] - k.k2b * no * s.conc[spO] +
           k.k3f * n_ss * s.conc[spOH] - k.k3b * no * s.conc[spH];
}

} // namespace detail

// Stationary NO concentration of the quasi-steady rate law: the level where
// the three reactions balance over the frozen pool. This sits slightly above
// the two-reaction equilibrium whenever the OH/H channel is active, and is
// the ceiling the integrator clips against. The rate is strictly decreasing
// in NO, so a grown bracket plus bisection pins it to full precision.
inline double stationary_no(const ZeldovichRates& k, const CombustionState& s) {
    if (!(detail::no_rate(k, s, 0.0) > 0.0)) return 0.0;
    double hi = std::max(equilibrium_no(k, s.conc[spN2], s.conc[spO2]), 1e-15);
    int grow = 0;
    while (detail::no_rate(k, s, hi) > 0.0) {
        hi *= 2.0;
        if (++grow > 400) throw solver_error("stationary_no: bracket growth failed");
    }
    double lo = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (detail::no_rate(k, s, mid) > 0.0 ? lo : hi) = mid;
    }
    return hi;
}

// Integrates NO formation from [NO]=0 over the residence time with a fixed
// RK4 step <= dt_max, clipping at the stationary (thermal-equilibrium) level.
inline double integrate_no(const CombustionState& state, double t_res_s, double dt_max_s) {
    if (!(t_res_s >= 0.0)) throw domain_error("integrate_no: t_res must be >= 0");
    if (t_res_s == 0.0) return 0.0;
    if (!(dt_max_s > 0.0)) throw domain_error("integrate_no: dt_max must be > 0");

    const ZeldovichRates k = zeldovich_rates(state.temperature_K);
    const double no_ceiling = stationary_no(k, state);
    if (no_ceiling == 0.0) return 0.0;
    const long n_steps = static_cast<long>(std::ceil(t_res_s / dt_max_s));
    if (n_steps <= 0) throw solver_error("integrate_no: step size underflow");
    const double dt = t_res_s / static_cast<double>(n_steps);

    double no = 0.0;
    for (long i = 0; i < n_steps; ++i) {
        const double f1 = detail::no_rate(k, state, no);
        const double f2 = detail::no_rate(k, state, no + 0.5 * dt * f1);
        const double f3 = detail::no_rate(k, state, no + 0.5 * dt * f2);
        const double f4 = detail::no_rate(k, state, no + dt * f3);
        no += dt / 6.0 * (f1 + 2.0 * f2 + 2.0 * f3 + f4);
        if (!std::isfinite(no)) throw solver_error("integrate_no: non-finite NO concentration");
        if (no >= no_ceiling) return no_ceiling;
    }
    return no;
}

// Small NO2 split: a fixed fraction of the formed NO leaves as NO2.
inline std::pair<double, double> partition_no2(double no_conc, double f_no2) {
    if (!(f_no2 >= 0.0 && f_no2 < 1.0)) throw domain_error("partition_no2: fraction must be in [0,1)");
    return {(1.0 - f_no2) * no_conc, f_no2 * no_conc};
}

struct EmissionResult {
    double y_no = 0.0;          // exhaust mass fractions
    double y_no2 = 0.0;
    double mdot_no_kg_s = 0.0;
    double mdot_no2_kg_s = 0.0;
    double mdot_nox_kg_s = 0.0;
};

// Mass flow of each oxide from its mass fraction and the total flow.
inline EmissionResult species_mass_flows(const CombustionState& state, double mdot_tot_kg_s) {
    if (mdot_tot_kg_s < 0.0) throw domain_error("species_mass_flows: mdot must be >= 0");
    EmissionResult r;
    if (state.rho_kg_m3 > 0.0) {
        r.y_no = state.conc[spNO] * kMolarMass[spNO] / state.rho_kg_m3;
        r.y_no2 = state.conc[spNO2] * kMolarMass[spNO2] / state.rho_kg_m3;
    }
    r.mdot_no_kg_s = r.y_no * mdot_tot_kg_s;
    r.mdot_no2_kg_s = r.y_no2 * mdot_tot_kg_s;
    r.mdot_nox_kg_s = r.mdot_no_kg_s + r.mdot_no2_kg_s;
    return r;
}

} // namespace rtcycle
