#include "iarc/quality.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "iarc/drift.hpp"
#include "iarc/error.hpp"
#include "iarc/stats.hpp"

namespace iarc {

QualityReport compute_quality(const TimeSeriesDataset& ds, Stage stage) {
  if (ds.empty()) throw Error(ErrorKind::empty_dataset, "quality report of an empty dataset");
  QualityReport report;
  report.stage = stage;
  report.dataset_name = ds.name();
  report.dataset_version = ds.dataset_version();
  report.row_count = ds.rows();
  report.feature_count = ds.cols();

  const auto& ts = ds.timestamps();
  const auto& batches = ds.batch_ids();
  for (std::size_t r = 1; r < ds.rows(); ++r) {
    const bool same_batch = !batches || (*batches)[r] == (*batches)[r - 1];
    if (same_batch && ts[r] == ts[r - 1]) ++report.duplicate_timestamps;
  }

  for (std::size_t c = 0; c < ds.cols(); ++c) {
    FeatureQuality fq;
    fq.feature = ds.feature_names()[c];
    auto observed = drop_missing(ds.column(c));
    fq.missing_count = ds.rows() - observed.size();
    fq.missingness_rate =
        static_cast<double>(fq.missing_count) / static_cast<double>(ds.rows());
    if (!observed.empty()) {
      std::sort(observed.begin(), observed.end());
      FeatureStats s;
      s.mean = mean(observed);
      s.std = sample_std(observed);
      s.min = observed.front();
      s.max = observed.back();
      s.p25 = quantile_sorted(observed, 0.25);
      s.p50 = quantile_sorted(observed, 0.50);
      s.p75 = quantile_sorted(observed, 0.75);
      fq.stats = s;
    }
    report.features.push_back(std::move(fq));
  }
  return report;
}

WindowedDriftScan windowed_drift_scan(const TimeSeriesDataset& ds, std::size_t window_count) {
  if (window_count < 2) {
    throw Error(ErrorKind::configuration, "windowed drift scan needs at least 2 windows");
  }
  if (window_count > ds.rows()) {
    throw Error(ErrorKind::configuration,
                fmt::format("window count {} exceeds row count {}", window_count, ds.rows()));
  }
  std::vector<std::size_t> order(ds.rows());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ds.timestamps()[a] < ds.timestamps()[b];
  });
  const std::size_t n = ds.rows();
  auto bound = [&](std::size_t w) { return w * n / window_count; };

  WindowedDriftScan scan;
  scan.window_count = window_count;
  for (std::size_t c = 0; c < ds.cols(); ++c) {
    std::vector<std::vector<double>> windows(window_count);
    for (std::size_t w = 0; w < window_count; ++w) {
      for (std::size_t k = bound(w); k < bound(w + 1); ++k) {
        const double v = ds.at(order[k], c);
        if (!is_missing(v)) windows[w].push_back(v);
      }
    }
    FeatureWindowDrift fd;
    fd.feature = ds.feature_names()[c];
    for (std::size_t w = 0; w + 1 < window_count; ++w) {
      if (windows[w].empty() || windows[w + 1].empty()) {
        fd.ks.emplace_back(std::nullopt);
        scan.warnings.push_back(
            fmt::format("feature '{}': window {} or {} has no observed values", fd.feature, w,
                        w + 1));
      } else {
        fd.ks.emplace_back(ks_statistic(windows[w], windows[w + 1]));
      }
    }
    scan.features.push_back(std::move(fd));
  }
  return scan;
}

void to_json(Json& j, const FeatureStats& v) {
  j = Json{{"mean", v.mean}, {"std", v.std}, {"min", v.min}, {"max", v.max},
           {"p25", v.p25},   {"p50", v.p50}, {"p75", v.p75}};
}

void from_json(const Json& j, FeatureStats& v) {
  j.at("mean").get_to(v.mean);
  j.at("std").get_to(v.std);
  j.at("min").get_to(v.min);
  j.at("max").get_to(v.max);
  j.at("p25").get_to(v.p25);
  j.at("p50").get_to(v.p50);
  j.at("p75").get_to(v.p75);
}

void to_json(Json& j, const FeatureQuality& v) {
  j = Json{{"feature", v.feature},
           {"missing_count", v.missing_count},
           {"missingness_rate", v.missingness_rate},
           {"statistics", v.stats},
           {"undefined_statistics", !v.stats.has_value()}};
}

void from_json(const Json& j, FeatureQuality& v) {
  j.at("feature").get_to(v.feature);
  j.at("missing_count").get_to(v.missing_count);
  j.at("missingness_rate").get_to(v.missingness_rate);
  j.at("statistics").get_to(v.stats);
}

void to_json(Json& j, const QualityReport& v) {
  j = Json{{"stage", v.stage},
           {"dataset_name", v.dataset_name},
           {"dataset_version", v.dataset_version},
           {"row_count", v.row_count},
           {"feature_count", v.feature_count},
           {"duplicate_timestamps", v.duplicate_timestamps},
           {"features", v.features}};
}

void from_json(const Json& j, QualityReport& v) {
  j.at("stage").get_to(v.stage);
  j.at("dataset_name").get_to(v.dataset_name);
  j.at("dataset_version").get_to(v.dataset_version);
  j.at("row_count").get_to(v.row_count);
  j.at("feature_count").get_to(v.feature_count);
  j.at("duplicate_timestamps").get_to(v.duplicate_timestamps);
  j.at("features").get_to(v.features);
}

void to_json(Json& j, const FeatureWindowDrift& v) {
  j = Json{{"feature", v.feature}, {"ks", v.ks}};
}

void from_json(const Json& j, FeatureWindowDrift& v) {
  j.at("feature").get_to(v.feature);
  j.at("ks").get_to(v.ks);
}

void to_json(Json& j, const WindowedDriftScan& v) {
  j = Json{{"window_count", v.window_count}, {"features", v.features}, {"warnings", v.warnings}};
}

void from_json(const Json& j, WindowedDriftScan& v) {
  j.at("window_count").get_to(v.window_count);
  j.at("features").get_to(v.features);
  j.at("warnings").get_to(v.warnings);
}

}  // namespace iarc
