#pragma once

// Fully connected regression network operating on min-max normalized data:
// affine + relu hidden layers, affine + sigmoid output, mean-squared-error
// loss and the Adam optimizer. Everything is 64-bit and sequential so a
// seed reproduces training bit-for-bit.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "rtcycle/config.hpp"
#include "rtcycle/dataset.hpp"
#include "rtcycle/errors.hpp"
#include "rtcycle/random.hpp"
#include "rtcycle/version.hpp"

namespace rtcycle {

enum class Activation : std::uint8_t { relu = 0, sigmoid = 1 };

inline double relu(double x) { return x > 0.0 ? x : 0.0; }

inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

struct MlpModel {
    std::vector<int> layer_sizes;                 // e.g. {7, 625, 625, 2}
    std::vector<std::vector<double>> weights;     // per layer, row-major [out x in]
    std::vector<std::vector<double>> biases;      // per layer, [out]
    std::vector<Activation> activations;          // per layer
    NormRecord norm{};                            // column scaling the model expects

    std::size_t num_layers() const { return weights.size(); }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (std::size_t l = 0; l < weights.size(); ++l)
            n += weights[l].size() + biases[l].size();
        return n;
    }
};

inline std::size_t mlp_parameter_count(const std::vector<int>& sizes) {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l)
        n += static_cast<std::size_t>(sizes[l]) * static_cast<std::size_t>(sizes[l + 1]) +
             static_cast<std::size_t>(sizes[l + 1]);
    return n;
}

// He-uniform init for relu layers, Glorot-uniform for the sigmoid layer,
// drawn in a fixed order from the seed.
inline MlpModel build_network(const std::vector<int>& layer_sizes, std::uint64_t seed) {
    if (layer_sizes.size() < 2) throw domain_error("build_network: need at least 2 layers");
    for (int s : layer_sizes)
        if (s < 1) throw domain_error("build_network: layer sizes must be >= 1");

    MlpModel m;
    m.layer_sizes = layer_sizes;
    SeededRng rng(split_seed(seed, 99));
    const std::size_t n_layers = layer_sizes.size() - 1;
    for (std::size_t l = 0; l < n_layers; ++l) {
        const auto fan_in = static_cast<double>(layer_sizes[l]);
        const auto fan_out = static_cast<double>(layer_sizes[l + 1]);
        const bool output_layer = (l + 1 == n_layers);
        m.activations.push_back(output_layer ? Activation::sigmoid : Activation::relu);
        const double bound = output_layer ? std::sqrt(6.0 / (fan_in + fan_out))
                                          : std::sqrt(6.0 / fan_in);
        std::vector<double> w(static_cast<std::size_t>(fan_in * fan_out));
        for (auto& x : w) x = rng.uniform(-bound, bound);
        m.weights.push_back(std::move(w));
        m.biases.emplace_back(static_cast<std::size_t>(fan_out), 0.0);
    }
    return m;
}

namespace detail {

inline double activate(Activation a, double x) {
    return a == Activation::relu ? relu(x) : sigmoid(x);
}

// derivative expressed through the activation output
inline double activate_grad(Activation a, double y) {
    return a == Activation::relu ? (y > 0.0 ? 1.0 : 0.0) : y * (1.0 - y);
}

} // namespace detail

// Single forward pass; input must be normalized to [0,1].
inline std::vector<double> forward(const MlpModel& m, const std::vector<double>& input) {
    if (input.size() != static_cast<std::size_t>(m.layer_sizes.front()))
        throw domain_error("forward: input size mismatch");
    std::vector<double> a = input;
    for (std::size_t l = 0; l < m.num_layers(); ++l) {
        const auto n_in = static_cast<std::size_t>(m.layer_sizes[l]);
        const auto n_out = static_cast<std::size_t>(m.layer_sizes[l + 1]);
        std::vector<double> next(n_out);
        const double* w = m.weights[l].data();
        for (std::size_t o = 0; o < n_out; ++o) {
            double z = m.biases[l][o];
            const double* row = w + o * n_in;
            for (std::size_t i = 0; i < n_in; ++i) z += row[i] * a[i];
            next[o] = detail::activate(m.activations[l], z);
        }
        a.swap(next);
    }
    for (double v : a)
        if (!std::isfinite(v)) throw solver_error("forward: non-finite activation");
    return a;
}

// Mean squared error over all entries of pred and target.
inline double mse_loss(const std::vector<double>& pred, const std::vector<double>& target) {
    if (pred.size() != target.size() || pred.empty())
        throw domain_error("mse_loss: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - target[i];
        s += d * d;
    }
    return s / static_cast<double>(pred.size());
}

struct Gradients {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;

    static Gradients zeros_like(const MlpModel& m) {
        Gradients g;
        for (std::size_t l = 0; l < m.num_layers(); ++l) {
            g.weights.emplace_back(m.weights[l].size(), 0.0);
            g.biases.emplace_back(m.biases[l].size(), 0.0);
        }
        return g;
    }
};

// Backprop of the mean-squared-error loss over a batch, accumulating into
// `grads` (averaged over batch rows and output entries). Returns the batch
// loss. `features`/`targets` are row-major [batch x n].
inline double backward(const MlpModel& m, const std::vector<double>& features,
                       const std::vector<double>& targets, std::size_t batch,
                       Gradients& grads) {
    const auto n_in0 = static_cast<std::size_t>(m.layer_sizes.front());
    const auto n_out_last = static_cast<std::size_t>(m.layer_sizes.back());
    if (features.size() != batch * n_in0 || targets.size() != batch * n_out_last)
        throw domain_error("backward: batch shape mismatch");
    const std::size_t n_layers = m.num_layers();

    // forward, keeping every activation: acts[0] = input, acts[l+1] = layer l output
    std::vector<std::vector<double>> acts(n_layers + 1);
    acts[0] = features;
    for (std::size_t l = 0; l < n_layers; ++l) {
        const auto n_in = static_cast<std::size_t>(m.layer_sizes[l]);
        const auto n_out = static_cast<std::size_t>(m.layer_sizes[l + 1]);
        acts[l + 1].assign(batch * n_out, 0.0);
        const double* w = m.weights[l].data();
        for (std::size_t b = 0; b < batch; ++b) {
            const double* in = acts[l].data() + b * n_in;
            double* out = acts[l + 1].data() + b * n_out;
            for (std::size_t o = 0; o < n_out; ++o) {
                double z = m.biases[l][o];
                const double* row = w + o * n_in;
                for (std::size_t i = 0; i < n_in; ++i) z += row[i] * in[i];
                out[o] = detail::activate(m.activations[l], z);
            }
        }
    }

    // loss and output delta
    const double denom = static_cast<double>(batch * n_out_last);
    double loss = 0.0;
    std::vector<double> delta(batch * n_out_last);
    for (std::size_t i = 0; i < delta.size(); ++i) {
        const double d = acts[n_layers][i] - targets[i];
        loss += d * d;
        delta[i] = 2.0 * d / denom *
                   detail::activate_grad(m.activations[n_layers - 1], acts[n_layers][i]);
    }
    loss /= denom;
    if (!std::isfinite(loss)) throw solver_error("backward: non-finite loss");

    // backward through the layers
    for (std::size_t l = n_layers; l-- > 0;) {
        const auto n_in = static_cast<std::size_t>(m.layer_sizes[l]);
        const auto n_out = static_cast<std::size_t>(m.layer_sizes[l + 1]);
        double* gw = grads.weights[l].data();
        double* gb = grads.biases[l].data();
        for (std::size_t b = 0; b < batch; ++b) {
            const double* in = acts[l].data() + b * n_in;
            const double* del = delta.data() + b * n_out;
            for (std::size_t o = 0; o < n_out; ++o) {
                const double d = del[o];
                gb[o] += d;
                double* grow = gw + o * n_in;
                for (std::size_t i = 0; i < n_in; ++i) grow[i] += d * in[i];
            }
        }
        if (l == 0) break;
        std::vector<double> prev_delta(batch * n_in, 0.0);
        const double* w = m.weights[l].data();
        for (std::size_t b = 0; b < batch; ++b) {
            const double* del = delta.data() + b * n_out;
            const double* act = acts[l].data() + b * n_in;
            double* pd = prev_delta.data() + b * n_in;
            for (std::size_t o = 0; o < n_out; ++o) {
                const double d = del[o];
                const double* row = w + o * n_in;
                for (std::size_t i = 0; i < n_in; ++i) pd[i] += d * row[i];
            }
            for (std::size_t i = 0; i < n_in; ++i)
                pd[i] *= detail::activate_grad(m.activations[l - 1], act[i]);
        }
        delta.swap(prev_delta);
    }
    return loss;
}

struct AdamState {
    std::vector<std::vector<double>> m_w, v_w, m_b, v_b;
    long t = 0;

    static AdamState zeros_like(const MlpModel& m) {
        AdamState s;
        for (std::size_t l = 0; l < m.num_layers(); ++l) {
            s.m_w.emplace_back(m.weights[l].size(), 0.0);
            s.v_w.emplace_back(m.weights[l].size(), 0.0);
            s.m_b.emplace_back(m.biases[l].size(), 0.0);
            s.v_b.emplace_back(m.biases[l].size(), 0.0);
        }
        return s;
    }
};

// One Adam update with bias-corrected moments.
inline void adam_step(MlpModel& model, const Gradients& grads, AdamState& st,
                      const TrainConfig& cfg) {
    ++st.t;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(st.t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(st.t));
    auto update = [&](std::vector<double>& p, const std::vector<double>& g,
                      std::vector<double>& mm, std::vector<double>& vv) {
        if (p.size() != g.size()) throw domain_error("adam_step: shape mismatch");
        for (std::size_t i = 0; i < p.size(); ++i) {
            mm[i] = cfg.beta1 * mm[i] + (1.0 - cfg.beta1) * g[i];
            vv[i] = cfg.beta2 * vv[i] + (1.0 - cfg.beta2) * g[i] * g[i];
            const double mhat = mm[i] / bc1;
            const double vhat = vv[i] / bc2;
            p[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
        }
    };
    for (std::size_t l = 0; l < model.num_layers(); ++l) {
        update(model.weights[l], grads.weights[l], st.m_w[l], st.v_w[l]);
        update(model.biases[l], grads.biases[l], st.m_b[l], st.v_b[l]);
    }
}

// Normalized feature/target arrays ready for the trainer.
struct TrainingData {
    std::size_t n = 0;
    std::vector<double> features;  // [n x kNumFeatures]
    std::vector<double> targets;   // [n x kNumTargets]

    static TrainingData from_dataset(const Dataset& ds) {
        TrainingData d;
        d.n = ds.samples.size();
        d.features.reserve(d.n * kNumFeatures);
        d.targets.reserve(d.n * kNumTargets);
        for (const auto& s : ds.samples) {
            d.features.insert(d.features.end(), s.features.begin(), s.features.end());
            d.targets.insert(d.targets.end(), s.targets.begin(), s.targets.end());
        }
        return d;
    }
};

struct TrainResult {
    std::vector<double> train_loss;  // per epoch, mean over samples seen
    std::vector<double> val_loss;    // per epoch, full validation pass
    int epochs_run = 0;
    int best_epoch = 0;
};

// Full-pass loss without touching the model.
inline double evaluate_loss(const MlpModel& m, const TrainingData& d) {
    if (d.n == 0) throw domain_error("evaluate_loss: empty set");
    const auto n_out = static_cast<std::size_t>(m.layer_sizes.back());
    const auto n_in = static_cast<std::size_t>(m.layer_sizes.front());
    double s = 0.0;
    std::vector<double> x(n_in);
    for (std::size_t i = 0; i < d.n; ++i) {
        std::memcpy(x.data(), d.features.data() + i * n_in, n_in * sizeof(double));
        const auto out = forward(m, x);
        for (std::size_t o = 0; o < n_out; ++o) {
            const double diff = out[o] - d.targets[i * n_out + o];
            s += diff * diff;
        }
    }
    return s / static_cast<double>(d.n * n_out);
}

// Mini-batch training with seeded shuffling, per-epoch train/validation loss
// history and early stop once the validation loss stops improving.
inline TrainResult train(MlpModel& model, const TrainingData& train_set,
                         const TrainingData& val_set, const TrainConfig& cfg) {
    if (train_set.n == 0 || val_set.n == 0) throw domain_error("train: empty set");
    const auto n_in = static_cast<std::size_t>(model.layer_sizes.front());
    const auto n_out = static_cast<std::size_t>(model.layer_sizes.back());

    SeededRng shuffle_rng(split_seed(cfg.seed, 7));
    std::vector<std::size_t> order(train_set.n);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    AdamState adam = AdamState::zeros_like(model);
    TrainResult result;
    double best_val = std::numeric_limits<double>::infinity();
    MlpModel best_model = model;
    int since_best = 0;

    std::vector<double> bf, bt;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        seeded_shuffle(order, shuffle_rng);
        double epoch_loss_sum = 0.0;
        for (std::size_t start = 0; start < train_set.n;
             start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t b =
                std::min<std::size_t>(cfg.batch_size, train_set.n - start);
            bf.assign(b * n_in, 0.0);
            bt.assign(b * n_out, 0.0);
            for (std::size_t r = 0; r < b; ++r) {
                const std::size_t src = order[start + r];
                std::memcpy(bf.data() + r * n_in, train_set.features.data() + src * n_in,
                            n_in * sizeof(double));
                std::memcpy(bt.data() + r * n_out, train_set.targets.data() + src * n_out,
                            n_out * sizeof(double));
            }
            Gradients grads = Gradients::zeros_like(model);
            double batch_loss = 0.0;
            try {
                batch_loss = backward(model, bf, bt, b, grads);
            } catch (const solver_error& e) {
                throw solver_error(std::string(e.what()) + " at epoch " +
                                   std::to_string(epoch));
            }
            epoch_loss_sum += batch_loss * static_cast<double>(b);
            adam_step(model, grads, adam, cfg);
        }
        result.train_loss.push_back(epoch_loss_sum / static_cast<double>(train_set.n));
        const double vl = evaluate_loss(model, val_set);
        if (!std::isfinite(vl))
            throw solver_error("train: validation loss diverged at epoch " +
                               std::to_string(epoch));
        result.val_loss.push_back(vl);
        result.epochs_run = epoch + 1;
        if (vl < best_val) {
            best_val = vl;
            best_model = model;
            result.best_epoch = epoch;
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            break;
        }
    }
    model = best_model;
    return result;
}

// ---------------------------------------------------------------------------
// model file: fixed little-endian layout, see docs in the repository README
// ---------------------------------------------------------------------------

static_assert(std::endian::native == std::endian::little,
              "model files are little-endian; big-endian hosts are unsupported");

inline constexpr char kModelMagic[8] = {'R', 'T', 'C', 'Y', 'C', 'M', 'L', 'P'};

inline void save_model(const MlpModel& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw format_error("cannot open '" + path + "' for writing");
    auto put_u32 = [&out](std::uint32_t v) {
        out.write(reinterpret_cast<const char*>(&v), 4);
    };
    out.write(kModelMagic, 8);
    put_u32(static_cast<std::uint32_t>(kModelFormatVersion));
    put_u32(static_cast<std::uint32_t>(m.layer_sizes.size()));
    for (int s : m.layer_sizes) put_u32(static_cast<std::uint32_t>(s));
    for (Activation a : m.activations) out.put(static_cast<char>(a));
    for (std::size_t l = 0; l < m.num_layers(); ++l) {
        out.write(reinterpret_cast<const char*>(m.weights[l].data()),
                  static_cast<std::streamsize>(m.weights[l].size() * sizeof(double)));
        out.write(reinterpret_cast<const char*>(m.biases[l].data()),
                  static_cast<std::streamsize>(m.biases[l].size() * sizeof(double)));
    }
    put_u32(static_cast<std::uint32_t>(kNumColumns));
    out.write(reinterpret_cast<const char*>(m.norm.min.data()),
              static_cast<std::streamsize>(m.norm.min.size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(m.norm.max.data()),
              static_cast<std::streamsize>(m.norm.max.size() * sizeof(double)));
    if (!out) throw format_error("write failed for '" + path + "'");
}

inline MlpModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw format_error("cannot open model file '" + path + "'");
    auto need = [&in, &path](bool ok) {
        if (!ok) throw format_error("model file '" + path + "' is truncated or corrupt");
    };
    char magic[8];
    need(static_cast<bool>(in.read(magic, 8)));
    if (std::memcmp(magic, kModelMagic, 8) != 0)
        throw format_error("'" + path + "' is not a model file");
    auto get_u32 = [&in, &need]() {
        std::uint32_t v = 0;
        need(static_cast<bool>(in.read(reinterpret_cast<char*>(&v), 4)));
        return v;
    };
    const std::uint32_t version = get_u32();
    if (version != static_cast<std::uint32_t>(kModelFormatVersion))
        throw format_error("model format version " + std::to_string(version) +
                           " unsupported (expected " + std::to_string(kModelFormatVersion) + ")");
    const std::uint32_t n_sizes = get_u32();
    if (n_sizes < 2 || n_sizes > 64) throw format_error("implausible layer count");
    MlpModel m;
    for (std::uint32_t i = 0; i < n_sizes; ++i) {
        const std::uint32_t s = get_u32();
        if (s < 1 || s > 1000000) throw format_error("implausible layer size");
        m.layer_sizes.push_back(static_cast<int>(s));
    }
    for (std::uint32_t l = 0; l + 1 < n_sizes; ++l) {
        const int a = in.get();
        need(a != EOF);
        if (a != 0 && a != 1) throw format_error("unknown activation tag");
        m.activations.push_back(static_cast<Activation>(a));
    }
    for (std::uint32_t l = 0; l + 1 < n_sizes; ++l) {
        const auto n_in = static_cast<std::size_t>(m.layer_sizes[l]);
        const auto n_out = static_cast<std::size_t>(m.layer_sizes[l + 1]);
        std::vector<double> w(n_in * n_out), b(n_out);
        need(static_cast<bool>(in.read(reinterpret_cast<char*>(w.data()),
                                       static_cast<std::streamsize>(w.size() * sizeof(double)))));
        need(static_cast<bool>(in.read(reinterpret_cast<char*>(b.data()),
                                       static_cast<std::streamsize>(b.size() * sizeof(double)))));
        m.weights.push_back(std::move(w));
        m.biases.push_back(std::move(b));
    }
    const std::uint32_t n_cols = get_u32();
    if (n_cols != static_cast<std::uint32_t>(kNumColumns))
        throw format_error("model expects " + std::to_string(n_cols) +
                           " normalization columns, this build uses " +
                           std::to_string(kNumColumns));
    need(static_cast<bool>(in.read(reinterpret_cast<char*>(m.norm.min.data()),
                                   static_cast<std::streamsize>(m.norm.min.size() * sizeof(double)))));
    need(static_cast<bool>(in.read(reinterpret_cast<char*>(m.norm.max.data()),
                                   static_cast<std::streamsize>(m.norm.max.size() * sizeof(double)))));
    char extra;
    if (in.read(&extra, 1)) throw format_error("trailing bytes in model file '" + path + "'");
    return m;
}

} // namespace rtcycle
