#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iarc/dataset.hpp"
#include "iarc/json_util.hpp"
#include "iarc/metrics.hpp"

namespace iarc {

// ---------------------------------------------------------------------------
// Synthetic fed-batch fermentation surrogate.
//
// Per batch: piecewise-constant feed with random regime switches;
// temperature, pH and dissolved oxygen revert to per-batch setpoints with
// Gaussian innovations. The product titer saturates in cumulative feed and is
// damped by a Gaussian bump around the optimal temperature:
//   titer = p_max (1 - exp(-k * cumulative_feed)) * g(T) + noise,
//   g(T) = exp(-0.5 ((T - t_opt) / t_width)^2),
// clipped at zero. All constants are tool defaults.
// ---------------------------------------------------------------------------

inline constexpr const char* kSurrogateTarget = "penicillin";
inline const std::vector<std::string> kSurrogateFeatures = {"feed_rate", "temperature", "pH",
                                                            "dissolved_oxygen"};

struct SyntheticProcessConfig {
  std::size_t batch_count = 20;
  std::size_t steps_per_batch = 200;
  double noise_std = 0.3;  // titer units (g/L)
  std::uint64_t seed = 42;

  double step_hours = 0.5;
  double p_max = 80.0;
  double k = 0.002;
  double t_opt = 298.0;
  double t_width = 3.0;
  /// Hold temperature exactly at each batch's setpoint (no innovations).
  bool constant_temperature = false;

  void validate() const;
};

double surrogate_titer(const SyntheticProcessConfig& cfg, double cumulative_feed,
                       double temperature);

/// Columns: the four sensor features followed by the target. Batches are
/// named B000, B001, ... and laid out back to back in absolute time.
TimeSeriesDataset generate_surrogate(const SyntheticProcessConfig& cfg);

// ---------------------------------------------------------------------------
// Ridge regression.
// ---------------------------------------------------------------------------

struct RidgeModel {
  std::vector<std::string> features;
  std::vector<double> weights;  // original feature units
  double intercept = 0.0;
  double lambda = 0.0;
  std::vector<double> feature_mean;
  std::vector<double> feature_std;     // floored; constant columns get weight 0
  std::vector<double> standardized_weights;
  double residual_std = 0.0;           // training residuals
  std::string trained_on;

  double predict(std::span<const double> x) const;
};

/// Solves (Z^T Z + lambda I) w = Z^T (y - mean(y)) on standardized,
/// non-constant columns. At lambda = 0 an underdetermined design with full
/// row rank gets the minimum-norm solution; collinear columns throw
/// ErrorKind::singular_system.
RidgeModel fit_ridge(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                     std::vector<std::string> feature_names = {});

// ---------------------------------------------------------------------------
// Soft sensor: imputation + derived cumulative input + ridge + conformal
// intervals.
// ---------------------------------------------------------------------------

struct SoftSensorSpec {
  std::vector<std::string> inputs = kSurrogateFeatures;
  std::string target = kSurrogateTarget;
  /// Integrate this input over batch time into an extra column.
  std::optional<std::string> integrate = std::string("feed_rate");
  std::string integrated_name = "cumulative_feed";
  double time_unit_seconds = 3600.0;
};

struct Design {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;               // NaN where the target is missing or absent
  std::vector<std::string> names;
  std::vector<bool> imputed;       // per row
};

/// Missing inputs are carried forward within a batch; a batch that starts
/// missing uses `fallback_means` (aligned with spec.inputs).
Design build_design(const TimeSeriesDataset& ds, const SoftSensorSpec& spec,
                    std::span<const double> fallback_means);

struct SoftSensor {
  SoftSensorSpec spec;
  RidgeModel model;
  std::vector<double> input_means;  // training means, used for imputation
};

SoftSensor fit_soft_sensor(const TimeSeriesDataset& train, const SoftSensorSpec& spec,
                           double lambda);

struct PointPredictions {
  std::vector<double> y_true, y_point;
  std::vector<bool> imputed;
};

/// Point predictions on rows that carry a target value.
PointPredictions predict_points(const SoftSensor& sensor, const TimeSeriesDataset& ds);

struct IntervalPrediction {
  PredictionSet predictions;
  std::vector<double> conformal_offsets;  // one per symmetric level pair
  std::vector<std::string> warnings;
};

/// Point predictions plus quantiles at `levels`: initial Gaussian intervals
/// point +/- z * residual_std, then split-conformal calibration of every
/// symmetric pair on `calibration`. Rows without a target are dropped.
IntervalPrediction predict_with_intervals(const SoftSensor& sensor, const TimeSeriesDataset& ds,
                                          const TimeSeriesDataset& calibration,
                                          const std::vector<double>& levels,
                                          std::string model_version, std::string slice_name);

void to_json(Json& j, const RidgeModel& v);
void from_json(const Json& j, RidgeModel& v);
void to_json(Json& j, const SoftSensor& v);

}  // namespace iarc
