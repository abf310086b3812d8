#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "iarc/json_util.hpp"

namespace iarc {

enum class Task { regression, classification };
enum class Orientation { lower_better, higher_better, target };

/// Ground truth and predictions of one model version on one data slice.
struct PredictionSet {
  Task task = Task::regression;
  std::string model_version;
  std::string slice_name;
  std::vector<double> y_true;

  // Regression: point predictions plus optional quantile columns;
  // quantiles[k] holds the predictions at levels[k].
  std::vector<double> y_point;
  std::vector<double> levels;
  std::vector<std::vector<double>> quantiles;

  // Classification: integer labels, per-row class probabilities and
  // optional raw logits.
  std::vector<int> labels;
  std::vector<std::vector<double>> probabilities;
  std::vector<std::vector<double>> logits;

  /// Rows whose inputs were imputed before predicting.
  std::vector<bool> imputed;

  std::size_t size() const {
    return task == Task::regression ? y_true.size() : labels.size();
  }
  std::size_t class_count() const { return probabilities.empty() ? 0 : probabilities[0].size(); }
  /// Index of `level` in levels (tolerance 1e-9).
  std::optional<std::size_t> level_index(double level) const;
  /// Throws ErrorKind::validation on misaligned arrays, bad levels, or
  /// probability rows not summing to 1 within 1e-6.
  void validate() const;
};

struct RegressionKpis {
  double mae = 0.0;
  double rmse = 0.0;
  std::optional<double> mape;  // empty when every target is ~0
  std::size_t mape_skipped = 0;

  bool operator==(const RegressionKpis&) const = default;
};

RegressionKpis regression_kpis(const PredictionSet& p);

struct IntervalMetrics {
  double lo = 0.0;
  double hi = 0.0;
  double nominal = 0.0;   // hi - lo
  double coverage = 0.0;  // closed-interval containment rate
  double mpiw = 0.0;

  bool operator==(const IntervalMetrics&) const = default;
};

IntervalMetrics interval_metrics(const PredictionSet& p, double lo, double hi);

/// Symmetric (l, 1 - l) pairs with l < 0.5 present in p.levels, ascending in l.
std::vector<std::pair<double, double>> symmetric_pairs(const PredictionSet& p);

/// Weighted interval score over the median column and every symmetric pair.
double wis(const PredictionSet& p);

struct ReliabilityBin {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
  std::optional<double> mean_confidence;  // empty for empty bins
  std::optional<double> accuracy;

  bool operator==(const ReliabilityBin&) const = default;
};

struct ClassificationScores {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double nll = 0.0;
  double brier = 0.0;
  double ece = 0.0;
  std::vector<ReliabilityBin> bins;

  bool operator==(const ClassificationScores&) const = default;
};

/// Equal-width confidence bins on [0, 1]; predicted class is the arg-max with
/// the lowest index winning ties; probabilities floored at 1e-12 inside NLL.
ClassificationScores classification_scores(const PredictionSet& p, std::size_t bins = 10);

struct ConformalResult {
  PredictionSet calibrated;
  double offset = 0.0;
  std::size_t calibration_size = 0;
  std::vector<std::string> warnings;
};

/// Split-conformal adjustment of the (lo, hi) interval. Scores on the
/// calibration set are max(q_lo - y, y - q_hi); the offset is the
/// ceil((n + 1)(1 - alpha))-th smallest score with alpha = 1 - (hi - lo).
ConformalResult conformal_calibrate(const PredictionSet& p_cal, const PredictionSet& p_apply,
                                    double lo, double hi);

struct TemperatureResult {
  PredictionSet calibrated;
  double temperature = 1.0;
  double nll_before = 0.0;  // calibration NLL at T = 1
  double nll_after = 0.0;   // calibration NLL at the fitted T
};

/// Golden-section search of the calibration NLL over T in [0.05, 20]
/// (tolerance 1e-4); T = 1 is kept if it scores better.
TemperatureResult temperature_scale(const PredictionSet& p_cal, const PredictionSet& p_apply);

std::vector<double> softmax(const std::vector<double>& logits, double temperature = 1.0);

struct MetricValue {
  std::string name;
  std::optional<double> value;
  Orientation orientation = Orientation::lower_better;
  std::optional<double> target;  // for Orientation::target

  bool operator==(const MetricValue&) const = default;
};

struct UqReport {
  Task task = Task::regression;
  std::string model_version;
  std::string slice_name;
  std::size_t n = 0;
  std::size_t imputed_rows = 0;
  std::optional<RegressionKpis> regression;
  std::vector<IntervalMetrics> intervals;
  std::optional<double> wis;
  std::optional<ClassificationScores> classification;
  std::vector<MetricValue> metrics;  // flat view with orientations
  std::vector<std::string> warnings;

  const MetricValue* metric(std::string_view name) const;
  bool operator==(const UqReport&) const = default;
};

/// All KPIs and uncertainty metrics applicable to the prediction set.
UqReport evaluate_predictions(const PredictionSet& p, std::size_t bins = 10);

std::string interval_metric_name(const char* prefix, double lo, double hi);

/// Prediction CSV: regression columns y_true, y_pred, q_<level>...;
/// classification columns y_true, p_0..p_{C-1}, optional logit_0..; both may
/// carry an `imputed` 0/1 column.
PredictionSet read_predictions_csv(const std::string& path, std::string model_version,
                                   std::string slice_name);
void write_predictions_csv(const PredictionSet& p, const std::string& path);

NLOHMANN_JSON_SERIALIZE_ENUM(Task, {{Task::regression, "regression"},
                                    {Task::classification, "classification"}})
NLOHMANN_JSON_SERIALIZE_ENUM(Orientation, {{Orientation::lower_better, "lower_better"},
                                           {Orientation::higher_better, "higher_better"},
                                           {Orientation::target, "target"}})

void to_json(Json& j, const MetricValue& v);
void from_json(const Json& j, MetricValue& v);
void to_json(Json& j, const UqReport& v);
void from_json(const Json& j, UqReport& v);

}  // namespace iarc
