#pragma once

#include <optional>
#include <string>
#include <vector>

#include "iarc/dataset.hpp"
#include "iarc/json_util.hpp"

namespace iarc {

enum class Stage { raw, preprocessed };

struct FeatureStats {
  double mean = 0.0;
  double std = 0.0;
  double min = 0.0;
  double max = 0.0;
  double p25 = 0.0;
  double p50 = 0.0;
  double p75 = 0.0;

  bool operator==(const FeatureStats&) const = default;
};

struct FeatureQuality {
  std::string feature;
  std::size_t missing_count = 0;
  double missingness_rate = 0.0;
  /// Empty when every cell of the feature is missing.
  std::optional<FeatureStats> stats;

  bool operator==(const FeatureQuality&) const = default;
};

struct QualityReport {
  Stage stage = Stage::raw;
  std::string dataset_name;
  std::string dataset_version;
  std::size_t row_count = 0;
  std::size_t feature_count = 0;
  /// Rows whose (batch, timestamp) repeats the previous row's.
  std::size_t duplicate_timestamps = 0;
  std::vector<FeatureQuality> features;

  bool operator==(const QualityReport&) const = default;
};

/// Per-feature missingness and summary statistics over non-missing cells.
QualityReport compute_quality(const TimeSeriesDataset& ds, Stage stage);

struct FeatureWindowDrift {
  std::string feature;
  /// KS statistic between window w and w + 1; empty where a window has no
  /// observed value for the feature.
  std::vector<std::optional<double>> ks;

  bool operator==(const FeatureWindowDrift&) const = default;
};

struct WindowedDriftScan {
  std::size_t window_count = 0;
  std::vector<FeatureWindowDrift> features;
  std::vector<std::string> warnings;

  bool operator==(const WindowedDriftScan&) const = default;
};

/// Rows are ordered by timestamp (stable) and cut into `window_count`
/// equal-count windows; adjacent windows are compared per feature.
WindowedDriftScan windowed_drift_scan(const TimeSeriesDataset& ds, std::size_t window_count);

NLOHMANN_JSON_SERIALIZE_ENUM(Stage, {{Stage::raw, "raw"}, {Stage::preprocessed, "preprocessed"}})

void to_json(Json& j, const FeatureStats& v);
void from_json(const Json& j, FeatureStats& v);
void to_json(Json& j, const FeatureQuality& v);
void from_json(const Json& j, FeatureQuality& v);
void to_json(Json& j, const QualityReport& v);
void from_json(const Json& j, QualityReport& v);
void to_json(Json& j, const FeatureWindowDrift& v);
void from_json(const Json& j, FeatureWindowDrift& v);
void to_json(Json& j, const WindowedDriftScan& v);
void from_json(const Json& j, WindowedDriftScan& v);

}  // namespace iarc
