#include "roaree/metrics.hpp"

#include <cmath>

#include "roaree/errors.hpp"
#include "roaree/optim.hpp"

namespace roaree {

namespace {

void check_pair(std::span<const double> p, std::span<const double> t) {
    if (p.size() != t.size()) {
        throw ShapeError("predictions and targets differ in length");
    }
    if (p.empty()) {
        throw ShapeError("metrics need at least one point");
    }
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!std::isfinite(p[i]) || !std::isfinite(t[i])) {
            throw DomainError("metrics input contains a non-finite value");
        }
    }
}

}  // namespace

RegressionMetrics regression_metrics(std::span<const double> predictions,
                                     std::span<const double> targets) {
    check_pair(predictions, targets);
    const double n = static_cast<double>(targets.size());
    double mean_t = 0.0;
    for (double t : targets) mean_t += t;
    mean_t /= n;

    double sse = 0.0, sae = 0.0, sst = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const double e = predictions[i] - targets[i];
        sse += e * e;
        sae += std::fabs(e);
        const double d = targets[i] - mean_t;
        sst += d * d;
    }
    RegressionMetrics m;
    m.mse = sse / n;
    m.rmse = std::sqrt(m.mse);
    m.mae = sae / n;
    if (sst > 0.0) {
        m.r2 = 1.0 - sse / sst;
    }
    return m;
}

double directional_accuracy(std::span<const double> predictions, std::span<const double> targets) {
    check_pair(predictions, targets);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (sign0(predictions[i]) == sign0(targets[i])) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(targets.size());
}

std::optional<double> mean_seconds(std::span<const double> epoch_seconds) {
    if (epoch_seconds.empty()) {
        return std::nullopt;
    }
    double s = 0.0;
    for (double v : epoch_seconds) s += v;
    return s / static_cast<double>(epoch_seconds.size());
}

}  // namespace roaree
