#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "iarc/card.hpp"
#include "iarc/dataset.hpp"
#include "iarc/drift.hpp"
#include "iarc/odd.hpp"
#include "iarc/quality.hpp"
#include "iarc/reference_model.hpp"
#include "iarc/robustness.hpp"
#include "iarc/scenarios.hpp"
#include "iarc/splits.hpp"

namespace iarc {

/// A reference-model version trained by the pipeline. An empty lambda means
/// "pick from lambda_grid by validation MAE".
struct ReferenceVersion {
  std::string model_version;
  std::optional<double> lambda;
};

struct ProjectConfig {
  std::optional<std::string> raw;
  std::optional<std::string> preprocessed;
  CsvColumns columns;
  std::string target;  // excluded from ODD, drift and fault injection
  std::optional<std::string> predictions;  // directory of <version>__<slice>.csv
  std::optional<std::string> catalog;
  std::optional<std::string> metadata;
  std::string out = "out";

  std::uint64_t seed = 42;
  std::string code_version = "unversioned";
  std::optional<std::string> created_at;  // "now" for wall-clock time

  double q_odd = 0.01;
  std::map<std::string, std::pair<double, double>> odd_manual_ranges;
  SplitConfig split;
  bool split_seed_explicit = false;  // otherwise derived from `seed`
  std::size_t key_feature_count = 4;
  std::size_t overlay_grid = 128;
  std::size_t drift_windows = 10;
  std::size_t reliability_bins = 10;
  std::string primary_metric = "mae";
  std::vector<double> levels = {0.05, 0.25, 0.5, 0.75, 0.95};
  std::vector<ReferenceVersion> reference_models = {{"1.0.0", std::nullopt}};
  std::vector<double> lambda_grid = {0.0, 0.01, 0.1, 1.0, 10.0, 100.0};
  std::vector<std::string> notes;

  /// Relative paths are resolved against `base_dir`.
  static ProjectConfig from_json(const Json& j, const std::string& base_dir = {});
  static ProjectConfig load(const std::string& path);
};

/// cfg.split with its seed derived from the master seed unless set explicitly.
SplitConfig effective_split(const ProjectConfig& cfg);

/// Last observation carried forward within each batch; leading gaps take
/// the batch's first observed value.
TimeSeriesDataset locf_fill(const TimeSeriesDataset& ds, std::string name);

struct PreparedData {
  TimeSeriesDataset raw;
  TimeSeriesDataset preprocessed;
  bool has_preprocessed = false;
  QualityReport quality_raw;
  QualityReport quality_preprocessed;
  std::vector<std::string> features;  // input features (target excluded)
  SplitAssignment split;
  SplitValidation split_validation;
  TimeSeriesDataset train, validation, calibration, test;
};

PreparedData prepare_data(const ProjectConfig& cfg);

OddModel fit_project_odd(const ProjectConfig& cfg, const PreparedData& data);

struct ScenarioData {
  ScenarioSpec spec;
  TimeSeriesDataset data;
};

/// Catalog from cfg.catalog, or the default catalog over `data.features`.
ScenarioCatalog project_catalog(const ProjectConfig& cfg, const PreparedData& data);
std::vector<ScenarioData> build_scenarios(const ProjectConfig& cfg, const PreparedData& data,
                                          const ScenarioCatalog& catalog);

/// Four fault families x severities {0.2, 0.5, 1.0} over `features`.
Json default_catalog_json(const std::vector<std::string>& features, std::uint64_t seed);

DistributionalDiagnostics run_drift(const ProjectConfig& cfg, const PreparedData& data,
                                    const std::vector<ScenarioData>& scenarios);

struct EvaluationResult {
  std::vector<UqReport> uq;
  std::vector<RobustnessSummary> summaries;
  std::optional<VersionComparison> comparison;
  std::vector<SoftSensor> models;          // reference mode only
  std::vector<PredictionSet> predictions;  // reference mode only
  std::vector<std::string> notes;
};

/// Trains cfg.reference_models and evaluates them on the base split and
/// every scenario.
EvaluationResult evaluate_reference(const ProjectConfig& cfg, const PreparedData& data,
                                    const ScenarioCatalog& catalog,
                                    const std::vector<ScenarioData>& scenarios,
                                    const CardMetadata* metadata);

/// Reads <dir>/<version>__<slice>.csv files.
EvaluationResult evaluate_prediction_files(const ProjectConfig& cfg, const std::string& dir,
                                           const ScenarioCatalog& catalog,
                                           const CardMetadata* metadata);

struct CardBuild {
  IarcDocument doc;
  std::string json;
  std::string html;
  EvaluationResult evaluation;
};

CardBuild build_card(const ProjectConfig& cfg, const CardMetadata& metadata, bool collapsible);

struct DemoOptions {
  std::uint64_t seed = 42;
  std::string out = "out";
  bool collapsible = false;
  std::optional<std::string> created_at;
  std::size_t batch_count = 20;
  std::size_t steps_per_batch = 200;
};

/// Writes surrogate inputs under <out>/inputs and the card under <out>.
CardBuild run_demo(const DemoOptions& options);

RunStamp project_run_stamp(const ProjectConfig& cfg, const CardMetadata* metadata);

}  // namespace iarc
