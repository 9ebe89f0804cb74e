#pragma once

// Combustion-product composition for lean hydrogen-air mixtures: major
// species from the atom balance, trace radicals (O, OH, H and residual H2)
// from dissociation equilibria. Equilibrium constants come from a small
// table of log10-Kp polynomial fits, shipped as a plain-text data file and
// mirrored by a builtin copy.

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "rtcycle/atmosphere.hpp"
#include "rtcycle/errors.hpp"

namespace rtcycle {

enum Species : int { spN2 = 0, spO2, spO, spOH, spH, spH2O, spNO, spNO2, spN, spH2, kNumSpecies };

inline constexpr std::array<double, kNumSpecies> kMolarMass = {
    28.0134,   // N2
    31.9988,   // O2
    15.9994,   // O
    17.00734,  // OH
    1.00794,   // H
    18.01528,  // H2O
    30.0061,   // NO
    46.0055,   // NO2
    14.0067,   // N
    2.01588,   // H2
};

inline constexpr const char* kSpeciesNames[kNumSpecies] = {
    "N2", "O2", "O", "OH", "H", "H2O", "NO", "NO2", "N", "H2"};

// log10 Kp = c0 + c1 z + c2 z^2 + c3 z^3 + c4 z^4 with z = 1000/T.
// Kp is referenced to P0 = 100 kPa; Kc = Kp * (P0/(Ru T))^dn.
struct KeqFit {
    double dn = 0.0;
    std::array<double, 5> c{};

    double log10_kp(double T) const {
        const double z = 1000.0 / T;
        return c[0] + z * (c[1] + z * (c[2] + z * (c[3] + z * c[4])));
    }
    double kc(double T) const {
        const double kp = std::pow(10.0, log10_kp(T));
        return kp * std::pow(100.0 / (kUniversalGasConst * T), dn);
    }
};

// Dissociation equilibria needed for the lean H2-air radical pool.
struct KeqTable {
    KeqFit o2_to_2o;            // O2 <-> 2 O
    KeqFit h2_to_2h;            // H2 <-> 2 H
    KeqFit h2o_to_h_oh;         // H2O <-> H + OH
    KeqFit h2o_to_h2_half_o2;   // H2O <-> H2 + 1/2 O2
    double t_min_K = 700.0;
    double t_max_K = 2700.0;
    int version = 1;

    // Mirrors data/keq_h2air_v1.dat; a regression test keeps them equal.
    // Fits derived from the thermodynamically consistent reverse/forward
    // rate-constant ratios of the Burke et al. (2012) H2/O2 mechanism.
    static KeqTable builtin() {
        KeqTable t;
        t.o2_to_2o = {1.0,
                      {+7.319077629475e+00, -2.809710541532e+01, +2.039278817186e+00,
                       -1.121801925896e+00, +2.487390567815e-01}};
        t.h2_to_2h = {1.0,
                      {+6.754048966461e+00, -2.583073687313e+01, +3.129897848699e+00,
                       -1.721748593149e+00, +3.817662558679e-01}};
        t.h2o_to_h_oh = {1.0,
                         {+7.386193051089e+00, -2.888357322521e+01, +2.912652121687e+00,
                          -1.602242288812e+00, +3.552679189210e-01}};
        t.h2o_to_h2_half_o2 = {0.5,
                               {+3.352961157083e+00, -1.445047337855e+01, +1.811714962367e+00,
                                -9.966196465295e-01, +2.209821761981e-01}};
        return t;
    }

    static KeqTable load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw parse_error("cannot open equilibrium table '" + path + "'");
        KeqTable t;
        bool seen[4] = {false, false, false, false};
        std::string line;
        long lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            std::istringstream ss(line);
            std::string name;
            if (!(ss >> name)) continue;
            if (name == "version") {
                if (!(ss >> t.version)) throw parse_error("bad version line", lineno);
                continue;
            }
            if (name == "t_range_K") {
                if (!(ss >> t.t_min_K >> t.t_max_K)) throw parse_error("bad t_range_K line", lineno);
                continue;
            }
            KeqFit fit;
            if (!(ss >> fit.dn >> fit.c[0] >> fit.c[1] >> fit.c[2] >> fit.c[3] >> fit.c[4]))
                throw parse_error("expected 'name dn c0 c1 c2 c3 c4'", lineno);
            double extra;
            if (ss >> extra) throw parse_error("too many fields", lineno);
            if (name == "o2_2o") t.o2_to_2o = fit, seen[0] = true;
            else if (name == "h2_2h") t.h2_to_2h = fit, seen[1] = true;
            else if (name == "h2o_h_oh") t.h2o_to_h_oh = fit, seen[2] = true;
            else if (name == "h2o_h2_half_o2") t.h2o_to_h2_half_o2 = fit, seen[3] = true;
            else throw parse_error("unknown reaction '" + name + "'", lineno);
        }
        for (bool s : seen)
            if (!s) throw parse_error("equilibrium table '" + path + "' is missing reactions");
        return t;
    }
};

struct CombustionState {
    double temperature_K = 0.0;   // flame temperature used for kinetics
    double pressure_kPa = 0.0;
    double phi = 0.0;             // equivalence ratio
    std::array<double, kNumSpecies> conc{};  // kmol/m^3
    double rho_kg_m3 = 0.0;
    double molar_mass_kg_kmol = 0.0;
};

// Fuel/air equivalence ratio for a hydrogen-air mixture.
inline double equivalence_ratio(double fuel_flow_kg_s, double air_flow_kg_s,
                                double far_stoich = 0.02936) {
    if (!(air_flow_kg_s > 0.0)) throw domain_error("equivalence_ratio: air flow must be > 0");
    return (fuel_flow_kg_s / air_flow_kg_s) / far_stoich;
}

// Equilibrium products of lean H2-air combustion at (T, P, phi).
// Major species from the atom balance per kmol of air (0.21 O2 + 0.79 N2),
// radicals from the dissociation table; majors are rebalanced so that atoms
// are conserved and the mixture stays on the ideal-gas line sum(c) = P/RuT.
inline CombustionState product_composition(double t_flame_K, double pressure_kPa, double phi,
                                           const KeqTable& keq = KeqTable::builtin()) {
    if (!(phi >= 0.0 && phi < 1.2))
        throw domain_error("product_composition: phi=" + std::to_string(phi) +
                           " outside [0, 1.2)");
    if (!(t_flame_K >= 800.0 && t_flame_K <= 2600.0))
        throw domain_error("product_composition: T=" + std::to_string(t_flame_K) +
                           " K outside [800, 2600] K");
    if (!(pressure_kPa > 0.0)) throw domain_error("product_composition: P must be > 0");
    if (!(t_flame_K >= keq.t_min_K && t_flame_K <= keq.t_max_K))
        throw domain_error("product_composition: T outside equilibrium-table range");

    // burned-mixture mole numbers per kmol of air, before dissociation
    const bool lean = phi < 1.0 - 1e-9;
    const bool rich = phi > 1.0 + 1e-9;
    const double n_h2o0 = 0.42 * std::min(phi, 1.0);
    const double n_o2_0 = lean ? 0.21 * (1.0 - phi) : 0.0;
    const double n_h2_0 = rich ? 0.42 * (phi - 1.0) : 0.0;
    const double n_n2_0 = 0.79;

    const double ctot = pressure_kPa / (kUniversalGasConst * t_flame_K);  // kmol/m^3
    const double kc_o2 = keq.o2_to_2o.kc(t_flame_K);
    const double kc_h2 = keq.h2_to_2h.kc(t_flame_K);
    const double kc_h2o = keq.h2o_to_h_oh.kc(t_flame_K);
    const double kc_redn = keq.h2o_to_h2_half_o2.kc(t_flame_K);

    double n_h2o = n_h2o0, n_o2 = n_o2_0, n_h2 = n_h2_0;
    double n_o = 0.0, n_oh = 0.0, n_h = 0.0;
    for (int iter = 0; iter < 4; ++iter) {
        const double n_tot = n_h2o + n_o2 + n_n2_0 + n_o + n_oh + n_h + n_h2;
        const double vol = n_tot / ctot;  // m^3 per basis
        const double c_h2o = n_h2o / vol;
        double c_o2 = n_o2 / vol;
        double c_h2 = n_h2 / vol;
        // close the water equilibrium for whichever of (H2, O2) is a trace
        if (c_h2o > 0.0) {
            if (lean) {
                c_h2 = (c_o2 > 0.0) ? kc_redn * c_h2o / std::sqrt(c_o2) : 0.0;
            } else if (rich) {
                c_o2 = (c_h2 > 0.0) ? std::pow(kc_redn * c_h2o / c_h2, 2.0) : 0.0;
            } else {
                // stoichiometric: water dissociates 2:1 into H2 and O2
                c_o2 = std::cbrt(0.25 * kc_redn * kc_redn * c_h2o * c_h2o);
                c_h2 = 2.0 * c_o2;
            }
        }
        const double c_o = (c_o2 > 0.0) ? std::sqrt(kc_o2 * c_o2) : 0.0;
        const double c_h = (c_h2 > 0.0) ? std::sqrt(kc_h2 * c_h2) : 0.0;
        const double c_oh = (c_h > 0.0) ? kc_h2o * c_h2o / c_h : 0.0;
        n_o = c_o * vol;
        n_h = c_h * vol;
        n_oh = c_oh * vol;
        // atom rebalance against the undissociated pool
        if (lean) {
            n_h2 = c_h2 * vol;
            n_h2o = n_h2o0 - 0.5 * (n_oh + n_h) - n_h2;
            n_o2 = n_o2_0 - 0.5 * n_o - 0.25 * n_oh + 0.25 * n_h + 0.5 * n_h2;
        } else if (rich) {
            n_o2 = c_o2 * vol;
            n_h2o = n_h2o0 - 2.0 * n_o2 - n_o - n_oh;
            n_h2 = n_h2_0 + (2.0 * n_o2 + n_o + n_oh) - 0.5 * (n_h + n_oh);
        } else {
            n_o2 = c_o2 * vol;
            n_h2 = c_h2 * vol;
            n_h2o = n_h2o0 - 2.0 * n_o2 - n_o - n_oh;
        }
        if (n_h2o < 0.0 || n_o2 < 0.0 || n_h2 < 0.0)
            throw solver_error("product_composition: dissociation exceeded the major pool");
    }

    const double n_tot = n_h2o + n_o2 + n_n2_0 + n_o + n_oh + n_h + n_h2;
    CombustionState st;
    st.temperature_K = t_flame_K;
    st.pressure_kPa = pressure_kPa;
    st.phi = phi;
    const double scale = ctot / n_tot;
    st.conc[spN2] = n_n2_0 * scale;
    st.conc[spO2] = n_o2 * scale;
    st.conc[spO] = n_o * scale;
    st.conc[spOH] = n_oh * scale;
    st.conc[spH] = n_h * scale;
    st.conc[spH2O] = n_h2o * scale;
    st.conc[spH2] = n_h2 * scale;
    st.conc[spNO] = 0.0;
    st.conc[spNO2] = 0.0;
    st.conc[spN] = 0.0;
    double rho = 0.0;
    for (int i = 0; i < kNumSpecies; ++i) rho += st.conc[i] * kMolarMass[i];
    st.rho_kg_m3 = rho;
    st.molar_mass_kg_kmol = rho / ctot;
    return st;
}

} // namespace rtcycle
