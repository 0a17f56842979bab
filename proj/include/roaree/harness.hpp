#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "roaree/data.hpp"
#include "roaree/metrics.hpp"
#include "roaree/model.hpp"
#include "roaree/optim.hpp"

namespace roaree {

inline constexpr std::size_t kDefaultEpochs = 64;
/// Trailing window (in epoch-to-epoch differences) of the oscillation score.
inline constexpr std::size_t kOscillationWindow = 32;

/// One point of a sweep. Surrogate fields are meaningful for Roaree only.
struct RunConfig {
    Method method = Method::Adam;
    double lr = 1e-3;
    double wd = 0.0;
    SurrogateSpec surrogate{};
    std::uint64_t seed = 0;
    std::size_t epochs = kDefaultEpochs;
    SSMConfig model{};

    Hyper hyper() const;
    /// "adam", or "roaree_erf_k10" for Roaree variants. Used in file names.
    std::string label() const;
};

struct RunRecord {
    RunConfig config;
    std::vector<double> train_loss;    // pre-step full-batch MSE per epoch
    std::vector<double> val_loss;      // post-step validation MSE per epoch
    std::vector<double> epoch_seconds; // gradient + optimizer step only
    std::vector<double> val_seconds;   // validation pass, timed separately
    std::optional<MetricReport> test;
    std::optional<std::size_t> diverged_epoch;

    bool diverged() const noexcept { return diverged_epoch.has_value(); }
    std::size_t epochs_completed() const noexcept { return train_loss.size(); }
    /// Sum of |val[e] - val[e-1]| over the last kOscillationWindow differences.
    double oscillation_score() const;
};

/// Trains one configuration full-batch on `data`. Never throws on numerical
/// divergence; the record is flagged instead.
RunRecord run_training(const RunConfig& config, const PreparedData& data);

struct GridConfig {
    std::vector<Method> optimizers;
    std::vector<double> lr_grid;
    std::vector<double> wd_grid;
    std::vector<SurrogateKind> surrogates;
    std::vector<double> kappa_grid;
    std::size_t epochs = kDefaultEpochs;
    std::uint64_t seed = 0;
    SSMConfig model{};

    /// "baseline-large", "baseline-small", or "roaree-small".
    static GridConfig preset(std::string_view name);
};

std::vector<std::string_view> grid_preset_names();

/// Cartesian product in (method, lr, wd, surrogate, kappa) order; surrogate
/// and kappa only expand for Roaree.
std::vector<RunConfig> expand_grid(const GridConfig& grid);

/// Runs every point of the grid on `workers` threads (0 = hardware
/// concurrency). Records come back in expand_grid order.
std::vector<RunRecord> grid_sweep(const GridConfig& grid, const PreparedData& data,
                                  std::size_t workers = 0);

enum class Objective { Min, Max };

/// Metric tokens: test_mse, test_rmse, test_mae, test_r2,
/// directional_accuracy, avg_epoch_seconds, final_val_mse, oscillation.
std::optional<double> metric_value(const RunRecord& record, std::string_view metric);

struct BestEntry {
    std::string key;  // method token, or run label when grouped by label
    std::optional<RunRecord> record;
    std::string note;  // why record is empty
};

/// Best non-diverged record per method, ties broken by lower lr, lower wd,
/// surrogate order, lower kappa. Methods whose runs all diverged are returned
/// without a record.
std::vector<BestEntry> select_best(const std::vector<RunRecord>& records, std::string_view metric,
                                   Objective objective);

/// Same as select_best but grouped by RunConfig::label().
std::vector<BestEntry> select_best_by_label(const std::vector<RunRecord>& records,
                                            std::string_view metric, Objective objective);

/// Writes results.csv, histories.jsonl, heatmap_<label>.csv, pareto.csv.
/// Returns the paths written. Throws Error with the path on I/O failure.
std::vector<std::filesystem::path> emit_results(const std::vector<RunRecord>& records,
                                                const std::filesystem::path& out_dir);

/// Column names of results.csv; the trailing kTimingColumns are wall-clock.
std::vector<std::string_view> results_columns();
inline constexpr std::size_t kTimingColumns = 2;

/// Per-label best runs read back from a results.csv, formatted as a table.
std::string report_results(const std::filesystem::path& results_csv, std::string_view metric,
                           Objective objective);

}  // namespace roaree
