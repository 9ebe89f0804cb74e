#pragma once

// Regression metric suite: MAE, MSE, RMSD, the Pearson correlation R and
// the determination factor reported both as R*R and, as a secondary
// diagnostic, as 1 - SSres/SStot.

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "rtcycle/errors.hpp"

namespace rtcycle {

struct ColumnMetrics {
    double mae = 0.0;
    double mse = 0.0;
    double rmsd = 0.0;
    double r = 0.0;
    double r2 = 0.0;       // r * r
    double r2_resid = 0.0; // 1 - SSres/SStot, diagnostic only
};

inline ColumnMetrics metrics(std::span<const double> truth, std::span<const double> pred) {
    if (truth.size() != pred.size()) throw domain_error("metrics: length mismatch");
    const std::size_t n = truth.size();
    if (n < 2) throw domain_error("metrics: need at least 2 samples");

    const double dn = static_cast<double>(n);
    double mean_t = 0.0, mean_p = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_t += truth[i];
        mean_p += pred[i];
    }
    mean_t /= dn;
    mean_p /= dn;

    double abs_sum = 0.0, sq_sum = 0.0, cov = 0.0, var_t = 0.0, var_p = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = truth[i] - pred[i];
        abs_sum += std::abs(e);
        sq_sum += e * e;
        const double dt = truth[i] - mean_t;
        const double dp = pred[i] - mean_p;
        cov += dt * dp;
        var_t += dt * dt;
        var_p += dp * dp;
    }
    if (!(var_t > 0.0)) throw domain_error("metrics: truth has zero variance, R undefined");

    ColumnMetrics m;
    m.mae = abs_sum / dn;
    m.mse = sq_sum / dn;
    m.rmsd = std::sqrt(m.mse);
    m.r = (var_p > 0.0) ? cov / std::sqrt(var_t * var_p) : 0.0;
    m.r2 = m.r * m.r;
    m.r2_resid = 1.0 - sq_sum / var_t;
    return m;
}

// Per-target metrics over [n x k] row-major prediction/truth blocks, in the
// layout the evaluation report prints (one column per target).
struct MetricsReport {
    std::vector<std::string> target_names;
    std::vector<ColumnMetrics> columns;
};

inline MetricsReport metrics_report(const std::vector<double>& truth,
                                    const std::vector<double>& pred, std::size_t n,
                                    const std::vector<std::string>& target_names) {
    const std::size_t k = target_names.size();
    if (truth.size() != n * k || pred.size() != n * k)
        throw domain_error("metrics_report: shape mismatch");
    MetricsReport rep;
    rep.target_names = target_names;
    std::vector<double> t(n), p(n);
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            t[i] = truth[i * k + c];
            p[i] = pred[i * k + c];
        }
        rep.columns.push_back(metrics(t, p));
    }
    return rep;
}

} // namespace rtcycle
