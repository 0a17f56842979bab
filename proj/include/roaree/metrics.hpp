#pragma once

#include <chrono>
#include <optional>
#include <span>
#include <vector>

namespace roaree {

struct RegressionMetrics {
    double mse = 0.0;
    double rmse = 0.0;
    double mae = 0.0;
    /// Empty when the targets have zero variance (R^2 undefined).
    std::optional<double> r2;
};

/// Throws ShapeError on empty or mismatched inputs, DomainError on non-finite values.
RegressionMetrics regression_metrics(std::span<const double> predictions,
                                     std::span<const double> targets);

/// Fraction of points where sign(prediction) == sign(target), sign(0) = 0.
double directional_accuracy(std::span<const double> predictions, std::span<const double> targets);

struct MetricReport {
    RegressionMetrics regression;
    double directional_accuracy = 0.0;
    /// Empty when no epochs ran.
    std::optional<double> avg_epoch_seconds;
};

/// Mean of per-epoch wall-clock times, or empty for zero epochs.
std::optional<double> mean_seconds(std::span<const double> epoch_seconds);

/// Monotonic stopwatch.
class EpochTimer {
public:
    EpochTimer() : start_(Clock::now()) {}
    void restart() { start_ = Clock::now(); }
    double seconds() const {
        return std::chrono::duration<double>(Clock::now() - start_).count();
    }

private:
    using Clock = std::chrono::steady_clock;
    Clock::time_point start_;
};

/// Seconds taken by one call of `body`.
template <typename Body>
double time_epoch(Body&& body) {
    EpochTimer timer;
    body();
    return timer.seconds();
}

}  // namespace roaree
