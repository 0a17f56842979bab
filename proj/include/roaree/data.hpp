#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "roaree/matrix.hpp"

namespace roaree {

/// Input columns in model order: return_t, ten technical indicators, three
/// valuation ratios, two sentiment scores, then adj_close.
inline constexpr std::array<std::string_view, 17> kFeatureColumns = {
    "return_t", "adx",     "adxr",        "trix",    "cci",     "macdh",
    "rsi_14",   "kdjk",    "wr_14",       "atr",     "atr_percent",
    "PbRatio",  "PeRatio", "PsRatio",     "spsentiment", "sentiment", "adj_close"};

inline constexpr std::size_t kNumFeatures = kFeatureColumns.size();
inline constexpr std::size_t kAdjCloseIndex = kNumFeatures - 1;

inline constexpr std::size_t kTestWeeks = 100;
inline constexpr std::size_t kMinTargetRows = 112;
inline constexpr std::size_t kMinSyntheticWeeks = 120;

struct FeatureRow {
    std::string date;  // ISO yyyy-mm-dd
    std::array<double, kNumFeatures> features{};

    double adj_close() const { return features[kAdjCloseIndex]; }
};

/// Reads the weekly feature CSV. Columns may appear in any order; unknown
/// columns are ignored. When adj_close is absent a price index with base 100
/// is rebuilt from return_t.
///
/// Throws SchemaError (missing column), RowError (bad cell, with line),
/// OrderingError (dates not strictly increasing), std::runtime_error on I/O.
std::vector<FeatureRow> load_csv(const std::filesystem::path& path);

/// Writes the same format load_csv reads, with shortest round-trip floats.
void write_csv(const std::filesystem::path& path, const std::vector<FeatureRow>& rows);

/// target[t] = adj_close[t+1] / adj_close[t] - 1; size is rows.size() - 1.
std::vector<double> build_target(const std::vector<FeatureRow>& rows);

struct RowRange {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const noexcept { return end - begin; }
};

struct NormStats {
    std::array<double, kNumFeatures> mean{};
    std::array<double, kNumFeatures> stddev{};
};

/// Chronological train / val / test ranges over the target-bearing rows.
struct DatasetSplit {
    RowRange train;
    RowRange val;
    RowRange test;
    std::vector<double> target;  // one per target-bearing row
    NormStats norm_stats;        // train rows only
};

/// Test is the final 100 target rows; val is the last floor(10%) of the rest.
/// `rows` may include the trailing target-less row; only the first
/// target.size() rows are used.
DatasetSplit split_causal(const std::vector<FeatureRow>& rows, std::vector<double> target);

/// Z-scores every target-bearing row with the train statistics. Features whose
/// train std is below 1e-12 are only centered.
FeatureMatrix normalize(const std::vector<FeatureRow>& rows, const DatasetSplit& split);

/// Deterministic synthetic weekly series in the same schema. n_weeks >= 120.
std::vector<FeatureRow> generate_synthetic(std::uint64_t seed, std::size_t n_weeks);

/// Loaded, split, and normalized data ready for training.
struct PreparedData {
    FeatureMatrix features;  // target-bearing rows, normalized
    DatasetSplit split;
};

PreparedData prepare(const std::vector<FeatureRow>& rows);

}  // namespace roaree
