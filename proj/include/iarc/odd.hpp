#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "iarc/dataset.hpp"
#include "iarc/json_util.hpp"
#include "iarc/stats.hpp"

namespace iarc {

/// Admissible region of one feature: a value range plus a KDE log-density
/// floor.
struct OddFeature {
  std::string feature;
  double lo = 0.0;
  double hi = 0.0;
  bool manual_range = false;
  double log_density_threshold = 0.0;
  std::size_t training_count = 0;  // non-missing training cells
  GaussianKde kde;                 // retained (possibly subsampled) training values
};

struct OddModel {
  double q_odd = 0.01;
  std::string fitted_on;           // dataset_version
  std::size_t sample_cap = 5000;
  std::uint64_t subsample_seed = 0;
  std::vector<OddFeature> features;
  std::vector<std::string> excluded_features;
  std::vector<std::string> warnings;

  const OddFeature* find(std::string_view feature) const;
};

struct OddFitOptions {
  double q_odd = 0.01;
  std::map<std::string, std::pair<double, double>> manual_ranges;
  /// Defaults to every dataset feature.
  std::vector<std::string> features;
  std::size_t sample_cap = 5000;
  std::uint64_t subsample_seed = 0;
};

/// Ranges are the observed [min, max] unless overridden; bandwidths follow
/// Silverman's rule; each threshold is the q_odd quantile of the training
/// points' own log-densities. Entirely missing features are excluded with a
/// warning.
OddModel fit_odd(const TimeSeriesDataset& train, const OddFitOptions& options);

enum class OddFailure { range, density, missing };

struct OddViolation {
  std::string feature;
  OddFailure kind = OddFailure::range;
};

struct OddVerdict {
  bool inside = true;
  std::vector<OddViolation> violations;
};

/// `row` is aligned with model.features. A feature is accepted when its value
/// is present, inside [lo, hi], and its log-density reaches the threshold.
OddVerdict membership(const OddModel& model, std::span<const double> row);

struct OddCoverage {
  double fraction = 0.0;
  std::size_t rows = 0;
  std::size_t inside = 0;
  std::vector<std::string> warnings;
};

/// Fraction of rows inside the ODD, using the ODD features the dataset has.
/// No overlapping feature yields 0 with a warning.
OddCoverage coverage_fraction(const OddModel& model, const TimeSeriesDataset& ds);

NLOHMANN_JSON_SERIALIZE_ENUM(OddFailure, {{OddFailure::range, "range"},
                                          {OddFailure::density, "density"},
                                          {OddFailure::missing, "missing"}})

/// Full model including retained samples (round-trips through from_json).
void to_json(Json& j, const OddModel& v);
void from_json(const Json& j, OddModel& v);
/// Card view: ranges, bandwidths, and thresholds without the samples.
Json odd_summary_json(const OddModel& v);

}  // namespace iarc
