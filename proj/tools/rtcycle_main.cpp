// Command-line front end: simulate single points, sweep trends, generate
// datasets, train and evaluate the surrogate network, and run predictions.
//
// Exit codes: 0 success, 1 usage/config error, 2 feasibility-flagged result,
// 3 solver or training failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rtcycle/dataset.hpp"
#include "rtcycle/engine.hpp"
#include "rtcycle/manifest.hpp"
#include "rtcycle/metrics.hpp"
#include "rtcycle/mlp.hpp"
#include "rtcycle/version.hpp"

namespace fs = std::filesystem;
using namespace rtcycle;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitSolver = 3;

struct GlobalOptions {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    bool seed_given = false;
    unsigned threads = 1;
};

EngineConfig effective_config(const GlobalOptions& g) {
    EngineConfig cfg;
    if (!g.config_path.empty()) cfg = load_config(g.config_path);
    if (g.seed_given) cfg.train.seed = g.seed;
    cfg.validate();
    return cfg;
}

KeqTable keq_for(const EngineConfig& cfg) {
    if (!cfg.keq_table_path.empty()) return KeqTable::load(cfg.keq_table_path);
    return KeqTable::builtin();
}

fs::path out_path(const GlobalOptions& g, const std::string& name) {
    fs::create_directories(g.out_dir);
    return fs::path(g.out_dir) / name;
}

std::array<double, kNumFeatures> parse_input_values(const std::string& csv) {
    std::array<double, kNumFeatures> v{};
    std::stringstream ss(csv);
    std::string field;
    int i = 0;
    while (std::getline(ss, field, ',')) {
        if (i >= kNumFeatures) throw domain_error("expected exactly 7 input values");
        v[static_cast<std::size_t>(i++)] = detail::parse_double(field);
    }
    if (i != kNumFeatures) throw domain_error("expected exactly 7 input values");
    return v;
}

void print_point(const PerformancePoint& p) {
    std::printf("input  tf_t2=%.4g cr=%.4g tit_K=%.6g rc1=%.4g dt_cool_K=%.4g mach=%.4g alt_m=%.6g\n",
                p.input.tf_t2, p.input.cr, p.input.tit_K, p.input.rc1, p.input.dt_cool_K,
                p.input.mach, p.input.alt_m);
    std::printf("power_out_kW    %14.4f\n", p.power_out_kW);
    std::printf("psfc_kg_kWh     %14.6f\n", p.psfc_kg_kWh);
    std::printf("psfc_kg_s_kW    %14.4e\n", p.psfc_kg_s_kW);
    std::printf("eta_thermal     %14.6f\n", p.eta_thermal);
    std::printf("mdot_no_kg_s    %14.6e\n", p.mdot_no_kg_s);
    std::printf("mdot_no2_kg_s   %14.6e\n", p.mdot_no2_kg_s);
    std::printf("mdot_nox_kg_s   %14.6e\n", p.mdot_nox_kg_s);
    std::printf("w_net1_kW=%.2f w_net2_kW=%.2f q_h_kW=%.2f q1_kW=%.2f q2_kW=%.2f q3_kW=%.2f\n",
                p.w_net1_kW, p.w_net2_kW, p.q_h_kW, p.q1_kW, p.q2_kW, p.q3_kW);
    std::printf("mdot_air=%.4f mdot_fuel=%.6f phi=%.4f sink_utilization=%.3f\n",
                p.mdot_air_kg_s, p.mdot_fuel_kg_s, p.phi, p.sink_utilization);
    std::printf("station   T_K        P_kPa      mdot_kg_s\n");
    auto st = [](const char* n, const GasStation& s) {
        std::printf("  %-6s %10.3f %10.4f %10.4f\n", n, s.temperature_K, s.pressure_kPa,
                    s.mass_flow_kg_s);
    };
    st("2", p.st2);
    st("3", p.st3);
    st("4", p.st4);
    st("5", p.st5);
    st("6", p.st6);
    auto cs = [](const char* n, const CoolantStation& s) {
        std::printf("  %-6s %10.3f %10.4f %10s\n", n, s.temperature_K, s.pressure_kPa,
                    s.phase == CoolantPhase::liquid ? "liquid" : "vapor");
    };
    cs("c1", p.c1);
    cs("c2", p.c2);
    cs("c3", p.c3);
    cs("c4", p.c4);
    cs("c5", p.c5);
    cs("c6", p.c6);
    std::printf("feasible        %14s\n", p.feasible ? "yes" : "no");
    for (const auto& f : p.flags) std::printf("flag: %s\n", f.c_str());
}

void write_trend_csv(const std::vector<TrendRow>& rows, TrendAxis axis, std::ostream& out) {
    out << trend_axis_name(axis)
        << ",power_out_kW,psfc_kg_kWh,eta_thermal,mdot_no_kg_s,mdot_no2_kg_s,"
           "mdot_nox_kg_s,w_net1_kW,w_net2_kW,q_h_kW,feasible\n";
    char buf[420];
    for (const auto& r : rows) {
        const PerformancePoint& p = r.point;
        std::snprintf(buf, sizeof buf,
                      "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n",
                      r.axis_value, p.power_out_kW, p.psfc_kg_kWh, p.eta_thermal,
                      p.mdot_no_kg_s, p.mdot_no2_kg_s, p.mdot_nox_kg_s, p.w_net1_kW,
                      p.w_net2_kW, p.q_h_kW, p.feasible ? 1 : 0);
        out << buf;
    }
}

double trend_metric(const PerformancePoint& p, const std::string& name) {
    if (name == "p_out") return p.power_out_kW;
    if (name == "psfc") return p.psfc_kg_kWh;
    if (name == "eta_th") return p.eta_thermal;
    if (name == "mdot_no") return p.mdot_no_kg_s;
    if (name == "mdot_no2") return p.mdot_no2_kg_s;
    if (name == "mdot_nox") return p.mdot_nox_kg_s;
    throw domain_error("unknown metric '" + name + "'");
}

void print_metrics_table(const MetricsReport& train_rep, const MetricsReport& test_rep) {
    std::printf("%-6s", "");
    for (const auto& name : train_rep.target_names)
        std::printf(" %14s-train %14s-test", name.c_str(), name.c_str());
    std::printf("\n");
    auto row = [&](const char* label, auto get) {
        std::printf("%-6s", label);
        for (std::size_t c = 0; c < train_rep.columns.size(); ++c)
            std::printf(" %20.6g %19.6g", get(train_rep.columns[c]), get(test_rep.columns[c]));
        std::printf("\n");
    };
    row("MSE", [](const ColumnMetrics& m) { return m.mse; });
    row("MAE", [](const ColumnMetrics& m) { return m.mae; });
    row("RMSD", [](const ColumnMetrics& m) { return m.rmsd; });
    row("R", [](const ColumnMetrics& m) { return m.r; });
    row("R^2", [](const ColumnMetrics& m) { return m.r2; });
}

nlohmann::json metrics_to_json(const MetricsReport& rep) {
    nlohmann::json j;
    for (std::size_t c = 0; c < rep.columns.size(); ++c) {
        const ColumnMetrics& m = rep.columns[c];
        j[rep.target_names[c]] = {{"mse", m.mse},   {"mae", m.mae}, {"rmsd", m.rmsd},
                                  {"r", m.r},       {"r2", m.r2},
                                  {"r2_resid", m.r2_resid}};
    }
    return j;
}

// normalize features with the model's record, run the net, denormalize outputs
std::array<double, kNumTargets> predict_raw(const MlpModel& model,
                                            const std::array<double, kNumFeatures>& raw) {
    std::vector<double> x(kNumFeatures);
    for (int i = 0; i < kNumFeatures; ++i) {
        const auto c = static_cast<std::size_t>(i);
        x[c] = (raw[c] - model.norm.min[c]) / (model.norm.max[c] - model.norm.min[c]);
    }
    const auto y = forward(model, x);
    std::array<double, kNumTargets> out{};
    for (int t = 0; t < kNumTargets; ++t) {
        const auto c = static_cast<std::size_t>(kNumFeatures + t);
        out[static_cast<std::size_t>(t)] =
            model.norm.min[c] + y[static_cast<std::size_t>(t)] * (model.norm.max[c] - model.norm.min[c]);
    }
    return out;
}

struct EvalData {
    std::vector<double> truth;  // [n x 2] raw units
    std::vector<double> pred;   // [n x 2] raw units
    std::size_t n = 0;
};

EvalData evaluate_partition(const MlpModel& model, const Dataset& part) {
    EvalData d;
    d.n = part.samples.size();
    d.truth.reserve(d.n * kNumTargets);
    d.pred.reserve(d.n * kNumTargets);
    for (const auto& s : part.samples) {
        const auto p = predict_raw(model, s.features);
        d.truth.insert(d.truth.end(), s.targets.begin(), s.targets.end());
        d.pred.insert(d.pred.end(), p.begin(), p.end());
    }
    return d;
}

const std::vector<std::string> kTargetNames = {"eta_th", "mdot_nox"};

int run(int argc, char** argv) {
    CLI::App app{"regenerative turboshaft combined-cycle simulator and surrogate trainer"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    GlobalOptions g;
    app.add_option("--config", g.config_path, "configuration file (key = value lines)");
    app.add_option("--out-dir", g.out_dir, "directory for output artifacts");
    auto* seed_opt = app.add_option("--seed", g.seed, "seed for all random draws");
    app.add_option("--threads", g.threads, "worker threads for sweeps and trends");

    // simulate ---------------------------------------------------------------
    auto* sim = app.add_subcommand("simulate", "evaluate one cycle point");
    std::string sim_input, sim_input_file;
    CycleInput sim_point;
    sim->add_option("--input", sim_input,
                    "7 comma-separated values: tf_t2,cr,tit_K,rc1,dt_cool_K,mach,alt_m");
    sim->add_option("--input-file", sim_input_file, "file holding the same 7 values");
    sim->add_option("--mach", sim_point.mach, "flight Mach number");
    sim->add_option("--alt", sim_point.alt_m, "flight altitude [m]");
    sim->add_option("--rc1", sim_point.rc1, "main compressor pressure ratio");
    sim->add_option("--tit", sim_point.tit_K, "turbine inlet temperature [K]");
    sim->add_option("--tf-t2", sim_point.tf_t2, "turbine 2 temperature fraction");
    sim->add_option("--cr", sim_point.cr, "accessory compression ratio");
    sim->add_option("--dt-cool", sim_point.dt_cool_K, "inlet cooling [K]");

    // trends -----------------------------------------------------------------
    auto* tr = app.add_subcommand("trends", "sweep one input axis and emit a CSV table");
    std::string tr_axis, tr_range, tr_monotone, tr_metric = "p_out", tr_out;
    int tr_n = 9;
    tr->add_option("--axis", tr_axis, "mach|alt|rc1|tit|tf_t2|cr|dt_cool")->required();
    tr->add_option("--range", tr_range, "lo,hi")->required();
    tr->add_option("--n", tr_n, "number of points (>= 2)");
    tr->add_option("--metric", tr_metric,
                   "metric for --assert-monotone: p_out|psfc|eta_th|mdot_no|mdot_no2|mdot_nox");
    tr->add_option("--assert-monotone", tr_monotone, "up|down: fail unless strictly monotone");
    tr->add_option("--out", tr_out, "CSV path (default <out-dir>/trend_<axis>.csv)");

    // sweep ------------------------------------------------------------------
    auto* sw = app.add_subcommand("sweep", "generate a Latin-hypercube dataset");
    std::size_t sw_n = 4899;
    std::string sw_out, sw_envelope;
    sw->add_option("--n", sw_n, "number of feasible samples to generate");
    sw->add_option("--envelope", sw_envelope, "config file with envelope.* overrides");
    sw->add_option("--out", sw_out, "dataset CSV path (default <out-dir>/dataset.csv)");

    // train ------------------------------------------------------------------
    auto* tn = app.add_subcommand("train", "train the surrogate network on a dataset");
    std::string tn_data, tn_model_out, tn_loss_out, tn_hidden = "625,625";
    int tn_epochs = -1, tn_batch = -1;
    double tn_fraction = -1.0;
    tn->add_option("--data", tn_data, "dataset CSV from 'sweep'")->required();
    tn->add_option("--out", tn_model_out, "model file path (default <out-dir>/surrogate.rtm)");
    tn->add_option("--loss-out", tn_loss_out, "epoch-loss CSV (default <out-dir>/loss.csv)");
    tn->add_option("--hidden", tn_hidden, "hidden layer sizes, e.g. 625,625");
    tn->add_option("--epochs", tn_epochs, "override train.epochs");
    tn->add_option("--batch-size", tn_batch, "override train.batch_size");
    tn->add_option("--train-fraction", tn_fraction, "override train.train_fraction");

    // eval -------------------------------------------------------------------
    auto* ev = app.add_subcommand("eval", "metric report for a trained model");
    std::string ev_data, ev_model, ev_out;
    double ev_fraction = -1.0;
    ev->add_option("--data", ev_data, "dataset CSV used for training")->required();
    ev->add_option("--model", ev_model, "model file")->required();
    ev->add_option("--out", ev_out, "JSON report path (default <out-dir>/metrics.json)");
    ev->add_option("--train-fraction", ev_fraction, "fraction used when the model was trained");

    // predict ----------------------------------------------------------------
    auto* pr = app.add_subcommand("predict", "run the surrogate on raw inputs");
    std::string pr_model, pr_input;
    pr->add_option("--model", pr_model, "model file")->required();
    pr->add_option("--input", pr_input,
                   "7 comma-separated values: tf_t2,cr,tit_K,rc1,dt_cool_K,mach,alt_m")
        ->required();

    CLI11_PARSE(app, argc, argv);
    g.seed_given = seed_opt->count() > 0;

    EngineConfig cfg = effective_config(g);
    const KeqTable keq = keq_for(cfg);
    const std::uint64_t seed = g.seed_given ? g.seed : cfg.train.seed;

    if (sim->parsed()) {
        CycleInput in = sim_point;
        if (!sim_input_file.empty()) {
            std::ifstream f(sim_input_file);
            if (!f) throw parse_error("cannot open input file '" + sim_input_file + "'");
            std::string line;
            std::getline(f, line);
            in = cycle_input_from_features(parse_input_values(line));
        } else if (!sim_input.empty()) {
            in = cycle_input_from_features(parse_input_values(sim_input));
        }
        const PerformancePoint p = evaluate_cycle(in, cfg, keq);
        print_point(p);
        return p.feasible ? kExitOk : kExitInfeasible;
    }

    if (tr->parsed()) {
        const TrendAxis axis = trend_axis_from_name(tr_axis);
        const auto comma = tr_range.find(',');
        if (comma == std::string::npos) throw domain_error("--range expects 'lo,hi'");
        const double lo = detail::parse_double(tr_range.substr(0, comma));
        const double hi = detail::parse_double(tr_range.substr(comma + 1));
        const CycleInput base;
        const auto rows = trend_study(axis, lo, hi, tr_n, base, cfg, keq, g.threads);

        const fs::path csv_path =
            tr_out.empty() ? out_path(g, "trend_" + tr_axis + ".csv") : fs::path(tr_out);
        std::ofstream out(csv_path, std::ios::binary);
        if (!out) throw parse_error("cannot write '" + csv_path.string() + "'");
        write_trend_csv(rows, axis, out);

        RunManifest man = make_manifest("trends", cfg, seed);
        man.output_paths = {csv_path.string()};
        write_manifest(man, csv_path.string() + ".manifest.json");

        if (!tr_monotone.empty()) {
            if (tr_monotone != "up" && tr_monotone != "down")
                throw domain_error("--assert-monotone expects up|down");
            const bool up = tr_monotone == "up";
            for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
                if (!rows[i].point.feasible || !rows[i + 1].point.feasible) {
                    std::fprintf(stderr, "monotonicity undefined: infeasible point in sweep\n");
                    return kExitInfeasible;
                }
                const double a = trend_metric(rows[i].point, tr_metric);
                const double b = trend_metric(rows[i + 1].point, tr_metric);
                if ((up && b <= a) || (!up && b >= a)) {
                    std::fprintf(stderr, "monotonicity violated at %s=%.6g (%.6g -> %.6g)\n",
                                 tr_axis.c_str(), rows[i + 1].axis_value, a, b);
                    return kExitInfeasible;
                }
            }
        }
        std::printf("wrote %s (%zu points)\n", csv_path.string().c_str(), rows.size());
        return kExitOk;
    }

    if (sw->parsed()) {
        if (!sw_envelope.empty()) {
            std::ifstream f(sw_envelope);
            if (!f) throw parse_error("cannot open envelope file '" + sw_envelope + "'");
            apply_config_stream(f, cfg);
        }
        SweepStats stats;
        const Dataset ds = generate_sweep(cfg.envelope, sw_n, seed, cfg, keq, g.threads, &stats);
        const fs::path csv_path = sw_out.empty() ? out_path(g, "dataset.csv") : fs::path(sw_out);
        write_csv(ds, csv_path.string());

        RunManifest man = make_manifest("sweep", cfg, seed);
        if (!sw_envelope.empty()) man.input_paths.push_back(sw_envelope);
        man.output_paths = {csv_path.string()};
        write_manifest(man, csv_path.string() + ".manifest.json");
        std::printf("wrote %s: %zu rows, %zu feasible of %zu attempts\n",
                    csv_path.string().c_str(), ds.size(), stats.feasible, stats.attempts);
        return kExitOk;
    }

    if (tn->parsed()) {
        if (tn_epochs > 0) cfg.train.epochs = tn_epochs;
        if (tn_batch > 0) cfg.train.batch_size = tn_batch;
        if (tn_fraction > 0.0) cfg.train.train_fraction = tn_fraction;
        cfg.train.seed = seed;
        cfg.train.validate();

        const Dataset raw = read_csv(tn_data).feasible_subset();
        if (raw.size() < 10) throw domain_error("dataset too small to train on");
        auto [norm_ds, rec] = normalize(raw);
        auto [train_ds, test_ds] = split(norm_ds, cfg.train.train_fraction, seed);

        std::vector<int> sizes{kNumFeatures};
        std::stringstream hs(tn_hidden);
        std::string tok;
        while (std::getline(hs, tok, ',')) sizes.push_back(std::stoi(tok));
        sizes.push_back(kNumTargets);

        MlpModel model = build_network(sizes, seed);
        model.norm = rec;
        const TrainingData train_data = TrainingData::from_dataset(train_ds);
        const TrainingData val_data = TrainingData::from_dataset(test_ds);
        const TrainResult res = train(model, train_data, val_data, cfg.train);

        const fs::path model_path =
            tn_model_out.empty() ? out_path(g, "surrogate.rtm") : fs::path(tn_model_out);
        save_model(model, model_path.string());

        const fs::path loss_path =
            tn_loss_out.empty() ? out_path(g, "loss.csv") : fs::path(tn_loss_out);
        {
            std::ofstream out(loss_path, std::ios::binary);
            out << "epoch,train_loss,val_loss\n";
            char buf[96];
            for (std::size_t e = 0; e < res.train_loss.size(); ++e) {
                std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", e, res.train_loss[e],
                              res.val_loss[e]);
                out << buf;
            }
        }
        RunManifest man = make_manifest("train", cfg, seed);
        man.input_paths = {tn_data};
        man.output_paths = {model_path.string(), loss_path.string()};
        write_manifest(man, model_path.string() + ".manifest.json");
        std::printf("trained %d epochs (best %d), params=%zu, model=%s\n", res.epochs_run,
                    res.best_epoch, model.parameter_count(), model_path.string().c_str());
        return kExitOk;
    }

    if (ev->parsed()) {
        if (ev_fraction > 0.0) cfg.train.train_fraction = ev_fraction;
        const MlpModel model = load_model(ev_model);
        const Dataset raw = read_csv(ev_data).feasible_subset();
        auto [train_ds, test_ds] = split(raw, cfg.train.train_fraction, seed);

        const EvalData tr_data = evaluate_partition(model, train_ds);
        const EvalData te_data = evaluate_partition(model, test_ds);
        const MetricsReport train_rep =
            metrics_report(tr_data.truth, tr_data.pred, tr_data.n, kTargetNames);
        const MetricsReport test_rep =
            metrics_report(te_data.truth, te_data.pred, te_data.n, kTargetNames);
        print_metrics_table(train_rep, test_rep);

        const fs::path rep_path = ev_out.empty() ? out_path(g, "metrics.json") : fs::path(ev_out);
        nlohmann::json j;
        j["train"] = metrics_to_json(train_rep);
        j["test"] = metrics_to_json(test_rep);
        std::ofstream out(rep_path, std::ios::binary);
        out << j.dump(2) << "\n";
        out.close();

        RunManifest man = make_manifest("eval", cfg, seed);
        man.input_paths = {ev_data, ev_model};
        man.output_paths = {rep_path.string()};
        write_manifest(man, rep_path.string() + ".manifest.json");
        return kExitOk;
    }

    if (pr->parsed()) {
        const MlpModel model = load_model(pr_model);
        const auto out = predict_raw(model, parse_input_values(pr_input));
        std::printf("eta_th        %.8f\n", out[0]);
        std::printf("mdot_nox_kgps %.8e\n", out[1]);
        return kExitOk;
    }

    return kExitUsage;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const solver_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitSolver;
    } catch (const envelope_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitSolver;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
}
