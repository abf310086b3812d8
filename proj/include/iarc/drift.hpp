#pragma once

#include <span>
#include <string>
#include <vector>

#include "iarc/dataset.hpp"
#include "iarc/json_util.hpp"

namespace iarc {

/// Two-sample Kolmogorov-Smirnov statistic sup_x |F_a(x) - F_b(x)| with
/// right-continuous ECDFs. Missing values are dropped; an empty sample throws
/// ErrorKind::undefined_statistic.
double ks_statistic(std::span<const double> a, std::span<const double> b);

/// First Wasserstein distance, the exact integral of |F_a - F_b| over the
/// merged support.
double wasserstein1(std::span<const double> a, std::span<const double> b);

struct FeatureDivergence {
  std::string feature;
  double ks_statistic = 0.0;
  double wasserstein1 = 0.0;
  double normalized_wasserstein = 0.0;  // wasserstein1 / training std

  bool operator==(const FeatureDivergence&) const = default;
};

struct DivergenceReport {
  std::string scenario;
  std::string dataset_version;
  std::vector<FeatureDivergence> features;  // training feature order
  std::vector<std::string> ranking;         // normalized_wasserstein desc, then name asc
  double score = 0.0;                       // mean normalized_wasserstein
  std::vector<std::string> warnings;

  bool operator==(const DivergenceReport&) const = default;
};

/// Compares every training feature also present in `scenario`. Features
/// absent from the scenario, or entirely missing in either dataset, are
/// skipped with a warning. No shared feature is a configuration error.
DivergenceReport scenario_divergence(const TimeSeriesDataset& train,
                                     const TimeSeriesDataset& scenario,
                                     std::span<const std::string> features = {});

struct KdeOverlay {
  std::string feature;
  std::string scenario;
  std::vector<double> grid;
  std::vector<double> train_density;
  std::vector<double> scenario_density;
  double train_bandwidth = 0.0;
  double scenario_bandwidth = 0.0;

  bool operator==(const KdeOverlay&) const = default;
};

/// Both Silverman KDEs on one uniform grid over the union range widened by
/// three of the larger bandwidth on each side.
KdeOverlay kde_overlay(std::span<const double> train_feature,
                       std::span<const double> scenario_feature, std::size_t grid_points);

/// Top `count` features by mean normalized Wasserstein across reports
/// (ties by name).
std::vector<std::string> key_features(std::span<const DivergenceReport> reports, std::size_t count);

void to_json(Json& j, const FeatureDivergence& v);
void from_json(const Json& j, FeatureDivergence& v);
void to_json(Json& j, const DivergenceReport& v);
void from_json(const Json& j, DivergenceReport& v);
void to_json(Json& j, const KdeOverlay& v);
void from_json(const Json& j, KdeOverlay& v);

}  // namespace iarc
