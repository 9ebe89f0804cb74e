#pragma once

// Everything the cycle model needs that is not a swept design variable:
// component efficiencies, geometry, pressure drops, working-fluid constants,
// the kinetics settings, the sweep envelope and the trainer settings.
//
// Config files are plain "key = value" lines, '#' starts a comment.
// Unknown keys are rejected so typos fail loudly.

#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "rtcycle/atmosphere.hpp"
#include "rtcycle/errors.hpp"

namespace rtcycle {

struct Range {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double x) const { return x >= lo && x <= hi; }
};

// Sweep envelope for the seven design inputs. Figure-axis ranges for
// altitude, Mach and inlet cooling; the remaining ranges are the
// documented reconstruction used to generate datasets.
struct SweepEnvelope {
    Range tf_t2{0.90, 0.99};
    Range cr{4.0, 10.0};
    Range tit_K{1400.0, 1600.0};
    // net power peaks near rc1 ~ 13.5 at the default closure as the exhaust
    // recovery fades; the envelope stays on the rising flank
    Range rc1{5.0, 12.0};
    Range dt_cool_K{0.0, 100.0};
    Range mach{0.3, 0.8};
    Range alt_m{3000.0, 4000.0};
};

struct TrainConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int epochs = 500;
    int batch_size = 32;
    int patience = 50;           // early stop on validation-loss plateau
    std::uint64_t seed = 1;
    double train_fraction = 0.2; // the published protocol trains on 20%

    void validate() const {
        if (!(learning_rate > 0.0)) throw domain_error("train: learning_rate must be > 0");
        if (!(beta1 > 0.0 && beta1 < 1.0)) throw domain_error("train: beta1 must be in (0,1)");
        if (!(beta2 > 0.0 && beta2 < 1.0)) throw domain_error("train: beta2 must be in (0,1)");
        if (!(epsilon > 0.0)) throw domain_error("train: epsilon must be > 0");
        if (epochs < 1 || batch_size < 1) throw domain_error("train: epochs/batch_size must be >= 1");
        if (!(train_fraction > 0.0 && train_fraction < 1.0))
            throw domain_error("train: train_fraction must be in (0,1)");
    }
};

struct EngineConfig {
    // main cycle
    double inlet_area_m2 = 0.3;
    double eta_compressor = 0.85;
    double eta_turbine1 = 0.90;
    double eta_combustor = 0.99;
    double dp_combustor_frac = 0.04;   // total-pressure loss across the burner
    double dp_recup_gas_frac = 0.03;   // gas-side loss across heat exchanger 2
    double fuel_lhv_kJ_kg = 120000.0;  // hydrogen
    double t2_floor_K = 150.0;         // coldest allowed compressor inlet
    double t6_floor_K = 200.0;         // coldest allowed exhaust

    // accessory (nitrogen) loop
    double coolant_flow_kg_s = 40.0;
    double pc6_anchor_kPa = 101.325;   // pump-inlet pressure anchor
    double eta_cooling_pump = 0.8;
    double liquid_n2_density_kg_m3 = 807.0;
    double liquid_n2_cp_kJ_kgK = 2.04;
    double n2_cp_kJ_kgK = 1.04;        // vapour, treated as constant
    double dp_coolant_hex_frac = 0.02; // each coolant hex, fraction of P3
    double eta_turbine2 = 1.0;
    double eta_turbine3 = 1.0;
    // Turbine 2 runs on a fixed expansion line: its pressure fraction is the
    // isentropic map evaluated at the design temperature fraction below.
    // The swept temperature fraction then varies extraction along that line.
    double tf_t2_design = 0.90;
    double hex2_effectiveness = 0.8;

    // fuel pump
    double eta_fuel_pump = 0.8;
    double fuel_density_kg_m3 = 70.8;  // liquid hydrogen
    double fuel_p_in_kPa = 100.0;
    double fuel_p_out_kPa = 2100.0;

    // condenser heat sink (cryogenic fuel side): capacity per kg of fuel is
    // cp * dT_allow + latent. Enforcement is off by default; utilization is
    // always reported per point.
    double sink_cp_kJ_kgK = 14.3;
    double sink_dt_allow_K = 1200.0;
    double sink_latent_kJ_kg = 446.0;
    bool sink_enforce = false;

    // emissions
    double far_stoich = 0.02936;       // H2-air stoichiometric fuel/air ratio
    double residence_time_s = 2e-3;
    double dt_max_s = 1e-6;
    double no2_fraction = 0.05;
    std::string keq_table_path;        // empty -> builtin table

    N2SaturationCoeffs n2_saturation{};
    SweepEnvelope envelope{};
    TrainConfig train{};

    double n2_heat_ratio() const {
        return n2_cp_kJ_kgK / (n2_cp_kJ_kgK - kGasConstN2);
    }

    void validate() const {
        auto in01 = [](double x) { return x > 0.0 && x <= 1.0; };
        if (!(inlet_area_m2 > 0.0)) throw domain_error("config: inlet_area_m2 must be > 0");
        if (!in01(eta_compressor) || !in01(eta_turbine1) || !in01(eta_combustor) ||
            !in01(eta_cooling_pump) || !in01(eta_fuel_pump) ||
            !in01(eta_turbine2) || !in01(eta_turbine3))
            throw domain_error("config: efficiencies must be in (0,1]");
        if (!(dp_combustor_frac >= 0.0 && dp_combustor_frac < 1.0) ||
            !(dp_recup_gas_frac >= 0.0 && dp_recup_gas_frac < 1.0) ||
            !(dp_coolant_hex_frac >= 0.0 && dp_coolant_hex_frac < 1.0))
            throw domain_error("config: pressure-drop fractions must be in [0,1)");
        if (!(fuel_lhv_kJ_kg > 0.0)) throw domain_error("config: fuel_lhv_kJ_kg must be > 0");
        if (!(coolant_flow_kg_s > 0.0)) throw domain_error("config: coolant_flow_kg_s must be > 0");
        if (!(tf_t2_design > 0.0 && tf_t2_design <= 1.0))
            throw domain_error("config: tf_t2_design must be in (0,1]");
        if (!(hex2_effectiveness >= 0.0 && hex2_effectiveness <= 1.0))
            throw domain_error("config: hex2_effectiveness must be in [0,1]");
        if (!(no2_fraction >= 0.0 && no2_fraction < 1.0))
            throw domain_error("config: no2_fraction must be in [0,1)");
        if (!(residence_time_s > 0.0) || !(dt_max_s > 0.0))
            throw domain_error("config: residence_time_s and dt_max_s must be > 0");
        if (!(n2_cp_kJ_kgK > kGasConstN2))
            throw domain_error("config: n2_cp_kJ_kgK must exceed the N2 gas constant");
        if (!(far_stoich > 0.0)) throw domain_error("config: far_stoich must be > 0");
        train.validate();
    }
};

namespace detail {

struct ConfigEntry {
    std::function<void(EngineConfig&, const std::string&)> set;
    std::function<std::string(const EngineConfig&)> get;
};

inline double parse_double(const std::string& s) {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    if (pos != s.size()) throw parse_error("bad numeric value '" + s + "'");
    return v;
}

inline std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

inline const std::map<std::string, ConfigEntry>& config_entries() {
    static const std::map<std::string, ConfigEntry> entries = [] {
        std::map<std::string, ConfigEntry> m;
        auto num = [&m](const char* key, double EngineConfig::* member) {
            m[key] = {[member](EngineConfig& c, const std::string& v) { c.*member = parse_double(v); },
                      [member](const EngineConfig& c) { return format_double(c.*member); }};
        };
        auto num_at = [&m](const char* key, auto accessor) {
            m[key] = {[accessor](EngineConfig& c, const std::string& v) { accessor(c) = parse_double(v); },
                      [accessor](const EngineConfig& c) {
                          return format_double(accessor(const_cast<EngineConfig&>(c)));
                      }};
        };
        auto integer_at = [&m](const char* key, auto accessor) {
            m[key] = {[accessor](EngineConfig& c, const std::string& v) {
                          accessor(c) = std::stoi(v);
                      },
                      [accessor](const EngineConfig& c) {
                          return std::to_string(accessor(const_cast<EngineConfig&>(c)));
                      }};
        };

        num("engine.inlet_area_m2", &EngineConfig::inlet_area_m2);
        num("engine.eta_compressor", &EngineConfig::eta_compressor);
        num("engine.eta_turbine1", &EngineConfig::eta_turbine1);
        num("engine.eta_combustor", &EngineConfig::eta_combustor);
        num("engine.dp_combustor_frac", &EngineConfig::dp_combustor_frac);
        num("engine.dp_recup_gas_frac", &EngineConfig::dp_recup_gas_frac);
        num("engine.fuel_lhv_kJ_kg", &EngineConfig::fuel_lhv_kJ_kg);
        num("engine.t2_floor_K", &EngineConfig::t2_floor_K);
        num("engine.t6_floor_K", &EngineConfig::t6_floor_K);
        num("accessory.coolant_flow_kg_s", &EngineConfig::coolant_flow_kg_s);
        num("accessory.pc6_anchor_kPa", &EngineConfig::pc6_anchor_kPa);
        num("accessory.eta_cooling_pump", &EngineConfig::eta_cooling_pump);
        num("accessory.liquid_n2_density_kg_m3", &EngineConfig::liquid_n2_density_kg_m3);
        num("accessory.liquid_n2_cp_kJ_kgK", &EngineConfig::liquid_n2_cp_kJ_kgK);
        num("accessory.n2_cp_kJ_kgK", &EngineConfig::n2_cp_kJ_kgK);
        num("accessory.dp_coolant_hex_frac", &EngineConfig::dp_coolant_hex_frac);
        num("accessory.eta_turbine2", &EngineConfig::eta_turbine2);
        num("accessory.eta_turbine3", &EngineConfig::eta_turbine3);
        num("accessory.tf_t2_design", &EngineConfig::tf_t2_design);
        num("accessory.hex2_effectiveness", &EngineConfig::hex2_effectiveness);
        num("fuel.eta_pump", &EngineConfig::eta_fuel_pump);
        num("fuel.density_kg_m3", &EngineConfig::fuel_density_kg_m3);
        num("fuel.p_in_kPa", &EngineConfig::fuel_p_in_kPa);
        num("fuel.p_out_kPa", &EngineConfig::fuel_p_out_kPa);
        num("sink.cp_kJ_kgK", &EngineConfig::sink_cp_kJ_kgK);
        num("sink.dt_allow_K", &EngineConfig::sink_dt_allow_K);
        num("sink.latent_kJ_kg", &EngineConfig::sink_latent_kJ_kg);
        m["sink.enforce"] = {[](EngineConfig& c, const std::string& v) {
                                 if (v == "true" || v == "1") c.sink_enforce = true;
                                 else if (v == "false" || v == "0") c.sink_enforce = false;
                                 else throw parse_error("sink.enforce expects true/false, got '" + v + "'");
                             },
                             [](const EngineConfig& c) {
                                 return std::string(c.sink_enforce ? "true" : "false");
                             }};
        num("emissions.far_stoich", &EngineConfig::far_stoich);
        num("emissions.residence_time_s", &EngineConfig::residence_time_s);
        num("emissions.dt_max_s", &EngineConfig::dt_max_s);
        num("emissions.no2_fraction", &EngineConfig::no2_fraction);
        m["emissions.keq_table_path"] = {[](EngineConfig& c, const std::string& v) {
                                             c.keq_table_path = v;
                                         },
                                         [](const EngineConfig& c) { return c.keq_table_path; }};
        num_at("n2_saturation.a", [](EngineConfig& c) -> double& { return c.n2_saturation.a; });
        num_at("n2_saturation.b", [](EngineConfig& c) -> double& { return c.n2_saturation.b; });
        num_at("n2_saturation.c", [](EngineConfig& c) -> double& { return c.n2_saturation.c; });
        num_at("envelope.tf_t2.lo", [](EngineConfig& c) -> double& { return c.envelope.tf_t2.lo; });
        num_at("envelope.tf_t2.hi", [](EngineConfig& c) -> double& { return c.envelope.tf_t2.hi; });
        num_at("envelope.cr.lo", [](EngineConfig& c) -> double& { return c.envelope.cr.lo; });
        num_at("envelope.cr.hi", [](EngineConfig& c) -> double& { return c.envelope.cr.hi; });
        num_at("envelope.tit_K.lo", [](EngineConfig& c) -> double& { return c.envelope.tit_K.lo; });
        num_at("envelope.tit_K.hi", [](EngineConfig& c) -> double& { return c.envelope.tit_K.hi; });
        num_at("envelope.rc1.lo", [](EngineConfig& c) -> double& { return c.envelope.rc1.lo; });
        num_at("envelope.rc1.hi", [](EngineConfig& c) -> double& { return c.envelope.rc1.hi; });
        num_at("envelope.dt_cool_K.lo", [](EngineConfig& c) -> double& { return c.envelope.dt_cool_K.lo; });
        num_at("envelope.dt_cool_K.hi", [](EngineConfig& c) -> double& { return c.envelope.dt_cool_K.hi; });
        num_at("envelope.mach.lo", [](EngineConfig& c) -> double& { return c.envelope.mach.lo; });
        num_at("envelope.mach.hi", [](EngineConfig& c) -> double& { return c.envelope.mach.hi; });
        num_at("envelope.alt_m.lo", [](EngineConfig& c) -> double& { return c.envelope.alt_m.lo; });
        num_at("envelope.alt_m.hi", [](EngineConfig& c) -> double& { return c.envelope.alt_m.hi; });
        num_at("train.learning_rate", [](EngineConfig& c) -> double& { return c.train.learning_rate; });
        num_at("train.beta1", [](EngineConfig& c) -> double& { return c.train.beta1; });
        num_at("train.beta2", [](EngineConfig& c) -> double& { return c.train.beta2; });
        num_at("train.epsilon", [](EngineConfig& c) -> double& { return c.train.epsilon; });
        integer_at("train.epochs", [](EngineConfig& c) -> int& { return c.train.epochs; });
        integer_at("train.batch_size", [](EngineConfig& c) -> int& { return c.train.batch_size; });
        integer_at("train.patience", [](EngineConfig& c) -> int& { return c.train.patience; });
        m["train.seed"] = {[](EngineConfig& c, const std::string& v) {
                               c.train.seed = std::stoull(v);
                           },
                           [](const EngineConfig& c) { return std::to_string(c.train.seed); }};
        num_at("train.train_fraction", [](EngineConfig& c) -> double& { return c.train.train_fraction; });
        return m;
    }();
    return entries;
}

} // namespace detail

// Applies "key = value" lines from `in` on top of `cfg`.
inline void apply_config_stream(std::istream& in, EngineConfig& cfg) {
    const auto& entries = detail::config_entries();
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw parse_error("expected 'key = value'", lineno);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        auto it = entries.find(key);
        if (it == entries.end()) throw parse_error("unknown config key '" + key + "'", lineno);
        try {
            it->second.set(cfg, value);
        } catch (const parse_error&) {
            throw;
        } catch (const std::exception& e) {
            throw parse_error(std::string(e.what()) + " for key '" + key + "'", lineno);
        }
    }
    cfg.validate();
}

inline EngineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open config file '" + path + "'");
    EngineConfig cfg;
    apply_config_stream(in, cfg);
    return cfg;
}

// Canonical text form of the effective configuration; hashed into manifests.
inline std::string serialize_config(const EngineConfig& cfg) {
    std::ostringstream out;
    for (const auto& [key, entry] : detail::config_entries())
        out << key << " = " << entry.get(cfg) << "\n";
    return out.str();
}

// FNV-1a, used to fingerprint the effective config in run manifests.
inline std::uint64_t fnv1a_hash(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace rtcycle
