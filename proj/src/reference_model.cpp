#include "iarc/reference_model.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <map>
#include <set>
#include <utility>

#include "iarc/error.hpp"
#include "iarc/rng.hpp"
#include "iarc/stats.hpp"

namespace iarc {

void SyntheticProcessConfig::validate() const {
  if (batch_count == 0 || steps_per_batch < 10) {
    throw Error(ErrorKind::configuration, "surrogate needs >= 1 batch and >= 10 steps per batch");
  }
  if (!(noise_std >= 0.0) || !(step_hours > 0.0) || !(t_width > 0.0) || !(k > 0.0)) {
    throw Error(ErrorKind::configuration, "surrogate constants out of range");
  }
}

double surrogate_titer(const SyntheticProcessConfig& cfg, double cumulative_feed,
                       double temperature) {
  const double z = (temperature - cfg.t_opt) / cfg.t_width;
  return cfg.p_max * (1.0 - std::exp(-cfg.k * cumulative_feed)) * std::exp(-0.5 * z * z);
}

TimeSeriesDataset generate_surrogate(const SyntheticProcessConfig& cfg) {
  cfg.validate();
  const std::size_t steps = cfg.steps_per_batch;
  const double dt = cfg.step_hours * 3600.0;
  const std::size_t cols = kSurrogateFeatures.size() + 1;

  std::vector<std::string> names = kSurrogateFeatures;
  names.emplace_back(kSurrogateTarget);
  std::vector<double> ts, values;
  std::vector<std::string> batches;
  ts.reserve(cfg.batch_count * steps);
  values.reserve(cfg.batch_count * steps * cols);

  for (std::size_t b = 0; b < cfg.batch_count; ++b) {
    const std::string id = fmt::format("B{:03d}", b);
    Rng rng(derive_seed(cfg.seed, "surrogate/" + id));
    double feed = 0.6 + 0.8 * rng.uniform();
    const double t_set = 297.5 + rng.uniform();
    const double ph_set = 6.4 + 0.2 * rng.uniform();
    const double do_set = 25.0 + 10.0 * rng.uniform();
    double temp = t_set, ph = ph_set, dox = do_set, cum = 0.0;
    // Batches are separated by a 10-step idle gap.
    const double t0 = static_cast<double>(b * (steps + 10)) * dt;
    for (std::size_t s = 0; s < steps; ++s) {
      if (rng.bernoulli(0.04)) feed = 0.4 + 1.2 * rng.uniform();
      if (s > 0) {
        const double e_t = rng.normal(), e_ph = rng.normal(), e_do = rng.normal();
        if (!cfg.constant_temperature) temp += 0.2 * (t_set - temp) + 0.08 * e_t;
        ph += 0.2 * (ph_set - ph) + 0.01 * e_ph;
        dox += 0.2 * (do_set - dox) + 0.6 * e_do;
      }
      cum += feed * cfg.step_hours;
      const double titer =
          std::max(0.0, surrogate_titer(cfg, cum, temp) + cfg.noise_std * rng.normal());
      ts.push_back(t0 + static_cast<double>(s) * dt);
      batches.push_back(id);
      values.insert(values.end(), {feed, temp, ph, dox, titer});
    }
  }
  Json prov = {{"generator", "fed-batch surrogate"},
               {"seed", cfg.seed},
               {"batch_count", cfg.batch_count},
               {"steps_per_batch", cfg.steps_per_batch},
               {"noise_std", cfg.noise_std}};
  return TimeSeriesDataset::create("surrogate", std::move(names), std::move(ts),
                                   std::move(values), std::move(batches), std::move(prov));
}

// ---------------------------------------------------------------------------

double RidgeModel::predict(std::span<const double> x) const {
  if (x.size() != weights.size()) {
    throw Error(ErrorKind::configuration,
                fmt::format("ridge model expects {} inputs, got {}", weights.size(), x.size()));
  }
  double acc = intercept;
  for (std::size_t j = 0; j < x.size(); ++j) acc += weights[j] * x[j];
  return acc;
}

RidgeModel fit_ridge(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                     std::vector<std::string> feature_names) {
  const auto n = x.rows();
  const auto p = x.cols();
  if (n == 0) throw Error(ErrorKind::empty_dataset, "ridge fit needs at least one row");
  if (y.size() != n) throw Error(ErrorKind::configuration, "ridge fit: x and y row counts differ");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorKind::configuration, "ridge lambda must be finite and >= 0");
  }
  if (!x.allFinite() || !y.allFinite()) {
    throw Error(ErrorKind::validation, "ridge fit: inputs contain missing or non-finite values");
  }
  if (feature_names.empty()) {
    for (Eigen::Index j = 0; j < p; ++j) feature_names.push_back(fmt::format("x{}", j));
  }
  if (static_cast<Eigen::Index>(feature_names.size()) != p) {
    throw Error(ErrorKind::configuration, "ridge fit: feature name count differs from columns");
  }

  RidgeModel m;
  m.features = std::move(feature_names);
  m.lambda = lambda;
  m.feature_mean.assign(p, 0.0);
  m.feature_std.assign(p, 0.0);
  m.weights.assign(p, 0.0);
  m.standardized_weights.assign(p, 0.0);

  std::vector<Eigen::Index> active;
  for (Eigen::Index j = 0; j < p; ++j) {
    std::vector<double> col(x.col(j).data(), x.col(j).data() + n);
    const double mu = mean(col);
    const double sd = sample_std(col);
    const double floor = scale_floor(mu);
    m.feature_mean[j] = mu;
    m.feature_std[j] = std::max(sd, floor);
    if (sd > floor) active.push_back(j);
  }
  const double y_mean = y.mean();
  const Eigen::VectorXd yc = y.array() - y_mean;

  const auto q = static_cast<Eigen::Index>(active.size());
  Eigen::VectorXd w = Eigen::VectorXd::Zero(q);
  if (q > 0) {
    Eigen::MatrixXd z(n, q);
    for (Eigen::Index k = 0; k < q; ++k) {
      const auto j = active[k];
      z.col(k) = (x.col(j).array() - m.feature_mean[j]) / m.feature_std[j];
    }
    if (lambda > 0.0) {
      Eigen::MatrixXd a = z.transpose() * z;
      a.diagonal().array() += lambda;
      w = a.ldlt().solve(z.transpose() * yc);
    } else {
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(z);
      cod.setThreshold(1e-10);
      const auto rank = cod.rank();
      const Eigen::Index max_rank = std::min<Eigen::Index>(n - 1, q);
      if (rank == q) {
        w = (z.transpose() * z).ldlt().solve(z.transpose() * yc);
      } else if (rank == n - 1 && rank == max_rank) {
        w = cod.solve(yc);  // minimum-norm interpolant
      } else {
        throw Error(ErrorKind::singular_system,
                    fmt::format("ridge fit with lambda = 0 is singular: design rank {} < {}", rank,
                                max_rank));
      }
    }
  }
  m.intercept = y_mean;
  for (Eigen::Index k = 0; k < q; ++k) {
    const auto j = active[k];
    m.standardized_weights[j] = w[k];
    m.weights[j] = w[k] / m.feature_std[j];
    m.intercept -= m.weights[j] * m.feature_mean[j];
  }

  std::vector<double> resid(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double pred = m.intercept;
    for (Eigen::Index j = 0; j < p; ++j) pred += m.weights[j] * x(i, j);
    resid[i] = y[i] - pred;
  }
  m.residual_std = sample_std(resid);
  return m;
}

// ---------------------------------------------------------------------------

Design build_design(const TimeSeriesDataset& ds, const SoftSensorSpec& spec,
                    std::span<const double> fallback_means) {
  if (fallback_means.size() != spec.inputs.size()) {
    throw Error(ErrorKind::configuration, "imputation means must align with soft-sensor inputs");
  }
  std::vector<std::size_t> idx;
  for (const auto& f : spec.inputs) idx.push_back(ds.feature_index(f));
  std::optional<std::size_t> integ;
  if (spec.integrate) {
    const auto it = std::find(spec.inputs.begin(), spec.inputs.end(), *spec.integrate);
    if (it == spec.inputs.end()) {
      throw Error(ErrorKind::configuration,
                  fmt::format("integrated input '{}' is not a soft-sensor input", *spec.integrate));
    }
    integ = static_cast<std::size_t>(it - spec.inputs.begin());
  }
  const auto target = ds.find_feature(spec.target);

  const std::size_t n = ds.rows();
  const std::size_t p = spec.inputs.size() + (integ ? 1 : 0);
  Design d;
  d.names = spec.inputs;
  if (integ) d.names.push_back(spec.integrated_name);
  d.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  d.y = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), kMissing);
  d.imputed.assign(n, false);

  const auto& batches = ds.batch_ids();
  const auto& ts = ds.timestamps();
  std::vector<double> last(fallback_means.begin(), fallback_means.end());
  double cum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool batch_start = i == 0 || (batches && (*batches)[i] != (*batches)[i - 1]);
    if (batch_start) {
      last.assign(fallback_means.begin(), fallback_means.end());
      cum = 0.0;
    }
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const double v = ds.at(i, idx[k]);
      if (is_missing(v)) {
        d.imputed[i] = true;
      } else {
        last[k] = v;
      }
      d.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = last[k];
    }
    if (integ) {
      // Step length: gap to the previous row, or to the next one at a batch start.
      double step = 0.0;
      if (!batch_start) {
        step = ts[i] - ts[i - 1];
      } else if (i + 1 < n && !(batches && (*batches)[i + 1] != (*batches)[i])) {
        step = ts[i + 1] - ts[i];
      }
      cum += last[*integ] * step / spec.time_unit_seconds;
      d.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p - 1)) = cum;
    }
    if (target) d.y[static_cast<Eigen::Index>(i)] = ds.at(i, *target);
  }
  return d;
}

SoftSensor fit_soft_sensor(const TimeSeriesDataset& train, const SoftSensorSpec& spec,
                           double lambda) {
  if (train.empty()) throw Error(ErrorKind::empty_dataset, "soft sensor needs training rows");
  SoftSensor s;
  s.spec = spec;
  for (const auto& f : spec.inputs) {
    const auto vals = drop_missing(train.column(f));
    if (vals.empty()) {
      throw Error(ErrorKind::undefined_statistic,
                  fmt::format("input '{}' has no observed training values", f));
    }
    s.input_means.push_back(mean(vals));
  }
  if (!train.find_feature(spec.target)) {
    throw Error(ErrorKind::configuration,
                fmt::format("target '{}' missing from training data", spec.target));
  }
  const Design d = build_design(train, spec, s.input_means);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < d.y.size(); ++i) {
    if (!is_missing(d.y[i])) keep.push_back(i);
  }
  if (keep.empty()) throw Error(ErrorKind::empty_dataset, "no training rows with a target value");
  Eigen::MatrixXd x = d.x(keep, Eigen::all);
  Eigen::VectorXd y = d.y(keep);
  s.model = fit_ridge(x, y, lambda, d.names);
  s.model.trained_on = train.dataset_version();
  return s;
}

PointPredictions predict_points(const SoftSensor& s, const TimeSeriesDataset& ds) {
  if (!ds.find_feature(s.spec.target)) {
    throw Error(ErrorKind::configuration,
                fmt::format("target '{}' missing from '{}'", s.spec.target, ds.name()));
  }
  const Design d = build_design(ds, s.spec, s.input_means);
  PointPredictions out;
  std::vector<double> row(static_cast<std::size_t>(d.x.cols()));
  for (Eigen::Index i = 0; i < d.x.rows(); ++i) {
    if (is_missing(d.y[i])) continue;
    for (Eigen::Index j = 0; j < d.x.cols(); ++j) row[j] = d.x(i, j);
    out.y_true.push_back(d.y[i]);
    out.y_point.push_back(s.model.predict(row));
    out.imputed.push_back(d.imputed[i]);
  }
  return out;
}

namespace {

PredictionSet gaussian_intervals(PointPredictions pts, const std::vector<double>& levels,
                                 double sigma) {
  PredictionSet p;
  p.task = Task::regression;
  p.levels = levels;
  boost::math::normal_distribution<double> nd;
  for (double lv : levels) {
    const double z = boost::math::quantile(nd, lv);
    std::vector<double> col(pts.y_point.size());
    for (std::size_t i = 0; i < col.size(); ++i) col[i] = pts.y_point[i] + z * sigma;
    p.quantiles.push_back(std::move(col));
  }
  p.y_true = std::move(pts.y_true);
  p.y_point = std::move(pts.y_point);
  p.imputed = std::move(pts.imputed);
  return p;
}

}  // namespace

IntervalPrediction predict_with_intervals(const SoftSensor& sensor, const TimeSeriesDataset& ds,
                                          const TimeSeriesDataset& calibration,
                                          const std::vector<double>& levels,
                                          std::string model_version, std::string slice_name) {
  for (double lv : levels) {
    if (!(lv > 0.0 && lv < 1.0)) {
      throw Error(ErrorKind::configuration, fmt::format("quantile level {} outside (0, 1)", lv));
    }
  }
  if (!std::is_sorted(levels.begin(), levels.end())) {
    throw Error(ErrorKind::configuration, "quantile levels must be ascending");
  }
  if (calibration.empty()) {
    throw Error(ErrorKind::insufficient_calibration, "calibration split is empty");
  }
  {
    // Calibration rows must not be evaluated rows.
    std::set<std::pair<std::string, double>> keys;
    const auto& cb = calibration.batch_ids();
    for (std::size_t i = 0; i < calibration.rows(); ++i) {
      keys.emplace(cb ? (*cb)[i] : std::string(), calibration.timestamps()[i]);
    }
    const auto& db = ds.batch_ids();
    for (std::size_t i = 0; i < ds.rows(); ++i) {
      if (keys.count({db ? (*db)[i] : std::string(), ds.timestamps()[i]})) {
        throw Error(ErrorKind::validation,
                    fmt::format("calibration data overlaps evaluated slice '{}'", slice_name));
      }
    }
  }

  const double sigma = sensor.model.residual_std;
  PredictionSet cal = gaussian_intervals(predict_points(sensor, calibration), levels, sigma);
  IntervalPrediction out;
  out.predictions = gaussian_intervals(predict_points(sensor, ds), levels, sigma);
  cal.model_version = out.predictions.model_version = std::move(model_version);
  out.predictions.slice_name = std::move(slice_name);
  cal.slice_name = "calibration";

  for (const auto& [lo, hi] : symmetric_pairs(out.predictions)) {
    ConformalResult r = conformal_calibrate(cal, out.predictions, lo, hi);
    out.conformal_offsets.push_back(r.offset);
    for (auto& w : r.warnings) out.warnings.push_back(std::move(w));
    out.predictions = std::move(r.calibrated);
  }
  return out;
}

void to_json(Json& j, const RidgeModel& v) {
  j = Json{{"features", v.features},
           {"weights", v.weights},
           {"intercept", v.intercept},
           {"lambda", v.lambda},
           {"feature_mean", v.feature_mean},
           {"feature_std", v.feature_std},
           {"standardized_weights", v.standardized_weights},
           {"residual_std", v.residual_std},
           {"trained_on", v.trained_on}};
}

void from_json(const Json& j, RidgeModel& v) {
  j.at("features").get_to(v.features);
  j.at("weights").get_to(v.weights);
  j.at("intercept").get_to(v.intercept);
  j.at("lambda").get_to(v.lambda);
  j.at("feature_mean").get_to(v.feature_mean);
  j.at("feature_std").get_to(v.feature_std);
  j.at("standardized_weights").get_to(v.standardized_weights);
  j.at("residual_std").get_to(v.residual_std);
  j.at("trained_on").get_to(v.trained_on);
}

void to_json(Json& j, const SoftSensor& v) {
  j = Json{{"inputs", v.spec.inputs},
           {"target", v.spec.target},
           {"integrate", v.spec.integrate},
           {"integrated_name", v.spec.integrated_name},
           {"input_means", v.input_means},
           {"model", v.model}};
}

}  // namespace iarc
