#pragma once

// Design-space dataset generation and handling: Latin-hypercube sweeps over
// the seven inputs, per-column min-max normalization, the train/test split
// and the CSV on-disk format.

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "rtcycle/engine.hpp"
#include "rtcycle/errors.hpp"
#include "rtcycle/random.hpp"

namespace rtcycle {

// A sweep envelope that cannot reach the requested number of feasible points.
class envelope_error : public std::runtime_error {
public:
    explicit envelope_error(const std::string& msg) : std::runtime_error(msg) {}
};

inline constexpr int kNumFeatures = 7;
inline constexpr int kNumTargets = 2;
inline constexpr int kNumColumns = kNumFeatures + kNumTargets;

// Column layout is fixed and versioned through these names.
inline constexpr const char* kCsvHeader =
    "tf_t2,cr,tit_K,rc1,dt_cool_K,mach,alt_m,eta_th,mdot_nox_kgps,feasible";

inline constexpr std::array<const char*, kNumColumns> kColumnNames = {
    "tf_t2", "cr", "tit_K", "rc1", "dt_cool_K", "mach", "alt_m",
    "eta_th", "mdot_nox_kgps"};

struct Sample {
    std::array<double, kNumFeatures> features{};  // tf_t2, cr, tit_K, rc1, dt_cool_K, mach, alt_m
    std::array<double, kNumTargets> targets{};    // eta_th, mdot_nox_kgps
    bool feasible = true;

    double column(int i) const {
        return i < kNumFeatures ? features[static_cast<std::size_t>(i)]
                                : targets[static_cast<std::size_t>(i - kNumFeatures)];
    }
    void set_column(int i, double v) {
        if (i < kNumFeatures) features[static_cast<std::size_t>(i)] = v;
        else targets[static_cast<std::size_t>(i - kNumFeatures)] = v;
    }
};

struct Dataset {
    std::vector<Sample> samples;

    std::size_t size() const { return samples.size(); }
    Dataset feasible_subset() const {
        Dataset out;
        for (const auto& s : samples)
            if (s.feasible) out.samples.push_back(s);
        return out;
    }
};

inline CycleInput cycle_input_from_features(const std::array<double, kNumFeatures>& f) {
    CycleInput in;
    in.tf_t2 = f[0];
    in.cr = f[1];
    in.tit_K = f[2];
    in.rc1 = f[3];
    in.dt_cool_K = f[4];
    in.mach = f[5];
    in.alt_m = f[6];
    return in;
}

inline std::array<double, kNumFeatures> features_from_cycle_input(const CycleInput& in) {
    return {in.tf_t2, in.cr, in.tit_K, in.rc1, in.dt_cool_K, in.mach, in.alt_m};
}

namespace detail {

// One Latin-hypercube batch: n strata per dimension, independently permuted,
// jittered within each stratum.
inline std::vector<std::array<double, kNumFeatures>> lhs_batch(const SweepEnvelope& env,
                                                               std::size_t n,
                                                               std::uint64_t seed) {
    const std::array<Range, kNumFeatures> ranges = {env.tf_t2, env.cr, env.tit_K, env.rc1,
                                                    env.dt_cool_K, env.mach, env.alt_m};
    std::vector<std::array<double, kNumFeatures>> pts(n);
    for (int d = 0; d < kNumFeatures; ++d) {
        SeededRng rng(split_seed(seed, static_cast<std::uint64_t>(d)));
        auto strata = shuffled_indices(n, rng);
        for (std::size_t i = 0; i < n; ++i) {
            const double u = (static_cast<double>(strata[i]) + rng.uniform01()) /
                             static_cast<double>(n);
            const auto& r = ranges[static_cast<std::size_t>(d)];
            pts[i][static_cast<std::size_t>(d)] = r.lo + (r.hi - r.lo) * u;
        }
    }
    return pts;
}

} // namespace detail

struct SweepStats {
    std::size_t attempts = 0;
    std::size_t feasible = 0;
    std::map<std::string, std::size_t> flag_counts;
};

// Latin-hypercube sweep until n_target feasible samples exist. Infeasible
// points are kept in the dataset, flagged, with NaN targets. Deterministic
// in (seed, envelope, config).
inline Dataset generate_sweep(const SweepEnvelope& env, std::size_t n_target,
                              std::uint64_t seed, const EngineConfig& cfg,
                              const KeqTable& keq = KeqTable::builtin(),
                              unsigned threads = 1, SweepStats* stats_out = nullptr) {
    if (n_target < 1) throw domain_error("generate_sweep: n_target must be >= 1");

    Dataset ds;
    SweepStats stats;
    const std::size_t yield_check_floor = std::max<std::size_t>(200, n_target);
    constexpr int kMaxBatches = 16;

    for (int batch = 0; batch < kMaxBatches && stats.feasible < n_target; ++batch) {
        const auto pts = detail::lhs_batch(env, n_target,
                                           split_seed(seed, 1000 + static_cast<std::uint64_t>(batch)));
        std::vector<PerformancePoint> evaluated(pts.size());
        parallel_index_for(pts.size(), threads, [&](std::size_t i) {
            evaluated[i] = evaluate_cycle(cycle_input_from_features(pts[i]), cfg, keq);
        });
        for (std::size_t i = 0; i < pts.size() && stats.feasible < n_target; ++i) {
            const PerformancePoint& p = evaluated[i];
            ++stats.attempts;
            Sample s;
            s.features = pts[i];
            s.feasible = p.feasible;
            if (p.feasible) {
                s.targets = {p.eta_thermal, p.mdot_nox_kg_s};
                ++stats.feasible;
            } else {
                s.targets = {std::nan(""), std::nan("")};
                for (const auto& f : p.flags) {
                    const auto colon = f.find(':');
                    ++stats.flag_counts[colon == std::string::npos ? f : f.substr(0, colon)];
                }
            }
            ds.samples.push_back(s);
        }
        if (stats.attempts >= yield_check_floor &&
            stats.feasible * 2 < stats.attempts) {
            std::string diag = "generate_sweep: feasible yield " +
                               std::to_string(stats.feasible) + "/" +
                               std::to_string(stats.attempts) + " below 50%;";
            for (const auto& [k, v] : stats.flag_counts)
                diag += " " + k + "=" + std::to_string(v);
            throw envelope_error(diag);
        }
    }
    if (stats.feasible < n_target) {
        throw envelope_error("generate_sweep: retry cap reached with " +
                             std::to_string(stats.feasible) + "/" +
                             std::to_string(n_target) + " feasible samples");
    }
    if (stats_out) *stats_out = stats;
    return ds;
}

// Per-column minima and maxima of all nine numeric columns.
struct NormRecord {
    std::array<double, kNumColumns> min{};
    std::array<double, kNumColumns> max{};
};

// Min-max scales every column to [0,1]. Requires non-constant columns.
inline std::pair<Dataset, NormRecord> normalize(const Dataset& ds) {
    if (ds.samples.empty()) throw domain_error("normalize: empty dataset");
    NormRecord rec;
    for (int c = 0; c < kNumColumns; ++c) {
        double lo = ds.samples[0].column(c), hi = lo;
        for (const auto& s : ds.samples) {
            lo = std::min(lo, s.column(c));
            hi = std::max(hi, s.column(c));
        }
        if (!(hi > lo))
            throw domain_error(std::string("normalize: constant column '") +
                               kColumnNames[static_cast<std::size_t>(c)] + "'");
        rec.min[static_cast<std::size_t>(c)] = lo;
        rec.max[static_cast<std::size_t>(c)] = hi;
    }
    Dataset out = ds;
    for (auto& s : out.samples)
        for (int c = 0; c < kNumColumns; ++c)
            s.set_column(c, (s.column(c) - rec.min[static_cast<std::size_t>(c)]) /
                               (rec.max[static_cast<std::size_t>(c)] -
                                rec.min[static_cast<std::size_t>(c)]));
    return {out, rec};
}

inline Dataset denormalize(const Dataset& ds01, const NormRecord& rec) {
    Dataset out = ds01;
    for (auto& s : out.samples)
        for (int c = 0; c < kNumColumns; ++c)
            s.set_column(c, rec.min[static_cast<std::size_t>(c)] +
                               s.column(c) * (rec.max[static_cast<std::size_t>(c)] -
                                              rec.min[static_cast<std::size_t>(c)]));
    return out;
}

// Seeded shuffle, then |train| = round(fraction * N).
inline std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction,
                                         std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw domain_error("split: fraction must be in (0,1)");
    const std::size_t n = ds.samples.size();
    const auto n_train = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(n)));
    if (n_train == 0 || n_train == n)
        throw domain_error("split: a partition would be empty");
    SeededRng rng(split_seed(seed, 42));
    const auto idx = shuffled_indices(n, rng);
    Dataset train, test;
    train.samples.reserve(n_train);
    test.samples.reserve(n - n_train);
    for (std::size_t i = 0; i < n; ++i)
        (i < n_train ? train : test).samples.push_back(ds.samples[idx[i]]);
    return {train, test};
}

inline void write_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // LF line endings everywhere
    if (!out) throw parse_error("cannot open '" + path + "' for writing");
    out << kCsvHeader << "\n";
    char buf[32];
    for (const auto& s : ds.samples) {
        std::string line;
        for (int c = 0; c < kNumColumns; ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", s.column(c));
            line += buf;
            line += ',';
        }
        line += s.feasible ? '1' : '0';
        out << line << "\n";
    }
    if (!out) throw parse_error("write failed for '" + path + "'");
}

inline Dataset read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw parse_error("empty dataset file '" + path + "'", 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader)
        throw parse_error("unexpected header (wrong column layout/version?) in '" + path + "'", 1);
    Dataset ds;
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        Sample s;
        std::size_t pos = 0;
        for (int c = 0; c < kNumColumns + 1; ++c) {
            const bool last = (c == kNumColumns);
            const std::size_t comma = line.find(',', pos);
            if (last != (comma == std::string::npos))
                throw parse_error("expected 10 comma-separated fields", lineno);
            const std::string field = line.substr(pos, last ? std::string::npos : comma - pos);
            try {
                if (last) {
                    if (field == "1") s.feasible = true;
                    else if (field == "0") s.feasible = false;
                    else throw parse_error("feasible flag must be 0 or 1");
                } else {
                    std::size_t used = 0;
                    const double v = std::stod(field, &used);
                    if (used != field.size()) throw parse_error("bad numeric field '" + field + "'");
                    s.set_column(c, v);
                }
            } catch (const parse_error& e) {
                throw parse_error(e.what(), lineno);
            } catch (const std::exception&) {
                throw parse_error("bad numeric field '" + field + "'", lineno);
            }
            pos = last ? line.size() : comma + 1;
        }
        ds.samples.push_back(s);
    }
    return ds;
}

} // namespace rtcycle
