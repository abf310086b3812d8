#include "iarc/odd.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "iarc/error.hpp"
#include "iarc/rng.hpp"

namespace iarc {

const OddFeature* OddModel::find(std::string_view feature) const {
  for (const auto& f : features) {
    if (f.feature == feature) return &f;
  }
  return nullptr;
}

OddModel fit_odd(const TimeSeriesDataset& train, const OddFitOptions& options) {
  if (train.empty()) throw Error(ErrorKind::empty_dataset, "cannot fit an ODD on no rows");
  if (!(options.q_odd > 0.0 && options.q_odd < 1.0)) {
    throw Error(ErrorKind::configuration,
                fmt::format("q_odd must lie in (0, 1), got {}", options.q_odd));
  }
  for (const auto& [name, range] : options.manual_ranges) {
    if (!train.find_feature(name)) {
      throw Error(ErrorKind::configuration,
                  fmt::format("manual ODD range for unknown feature '{}'", name));
    }
    if (!(range.first <= range.second)) {
      throw Error(ErrorKind::configuration,
                  fmt::format("manual ODD range for '{}' has lo > hi", name));
    }
  }

  OddModel model;
  model.q_odd = options.q_odd;
  model.fitted_on = train.dataset_version();
  model.sample_cap = options.sample_cap;
  model.subsample_seed = options.subsample_seed;
  const auto names = options.features.empty() ? train.feature_names() : options.features;

  for (const auto& name : names) {
    auto values = drop_missing(train.column(name));
    if (values.empty()) {
      model.excluded_features.push_back(name);
      model.warnings.push_back(
          fmt::format("ODD: feature '{}' is entirely missing in training data and is excluded",
                      name));
      continue;
    }
    OddFeature f;
    f.feature = name;
    f.training_count = values.size();
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    f.lo = *mn;
    f.hi = *mx;
    if (auto it = options.manual_ranges.find(name); it != options.manual_ranges.end()) {
      f.lo = it->second.first;
      f.hi = it->second.second;
      f.manual_range = true;
    }
    if (values.size() > options.sample_cap) {
      Rng rng(derive_seed(options.subsample_seed, name));
      for (std::size_t i = 0; i < options.sample_cap; ++i) {
        std::swap(values[i], values[i + rng.index(values.size() - i)]);
      }
      values.resize(options.sample_cap);
      model.warnings.push_back(fmt::format(
          "ODD: feature '{}' KDE uses a {}-point subsample of {} training values", name,
          options.sample_cap, f.training_count));
    }
    f.kde = GaussianKde::fit(std::move(values));
    std::vector<double> self;
    self.reserve(f.kde.samples().size());
    for (double x : f.kde.samples()) self.push_back(f.kde.log_density(x));
    std::sort(self.begin(), self.end());
    f.log_density_threshold = quantile_sorted(self, options.q_odd);
    model.features.push_back(std::move(f));
  }
  return model;
}

OddVerdict membership(const OddModel& model, std::span<const double> row) {
  OddVerdict verdict;
  for (std::size_t k = 0; k < model.features.size(); ++k) {
    const auto& f = model.features[k];
    const double x = k < row.size() ? row[k] : kMissing;
    std::optional<OddFailure> failure;
    if (is_missing(x)) {
      failure = OddFailure::missing;
    } else if (x < f.lo || x > f.hi) {
      failure = OddFailure::range;
    } else if (f.kde.log_density(x) < f.log_density_threshold) {
      failure = OddFailure::density;
    }
    if (failure) {
      verdict.inside = false;
      verdict.violations.push_back({f.feature, *failure});
    }
  }
  return verdict;
}

OddCoverage coverage_fraction(const OddModel& model, const TimeSeriesDataset& ds) {
  OddCoverage cov;
  cov.rows = ds.rows();
  OddModel view;
  std::vector<std::size_t> cols;
  for (const auto& f : model.features) {
    if (auto c = ds.find_feature(f.feature)) {
      view.features.push_back(f);
      cols.push_back(*c);
    } else {
      cov.warnings.push_back(fmt::format("ODD feature '{}' absent from dataset '{}'", f.feature,
                                         ds.name()));
    }
  }
  if (view.features.empty() || ds.empty()) {
    cov.warnings.push_back(fmt::format(
        "dataset '{}' has no ODD feature overlap or no rows; coverage defined as 0", ds.name()));
    return cov;
  }
  std::vector<double> row(cols.size());
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    for (std::size_t k = 0; k < cols.size(); ++k) row[k] = ds.at(r, cols[k]);
    if (membership(view, row).inside) ++cov.inside;
  }
  cov.fraction = static_cast<double>(cov.inside) / static_cast<double>(cov.rows);
  return cov;
}

void to_json(Json& j, const OddModel& v) {
  Json features = Json::array();
  for (const auto& f : v.features) {
    features.push_back(Json{{"feature", f.feature},
                            {"range", {f.lo, f.hi}},
                            {"manual_range", f.manual_range},
                            {"bandwidth", f.kde.bandwidth()},
                            {"log_density_threshold", f.log_density_threshold},
                            {"training_count", f.training_count},
                            {"samples", f.kde.samples()}});
  }
  j = Json{{"q_odd", v.q_odd},
           {"fitted_on", v.fitted_on},
           {"sample_cap", v.sample_cap},
           {"subsample_seed", v.subsample_seed},
           {"features", features},
           {"excluded_features", v.excluded_features},
           {"warnings", v.warnings}};
}

void from_json(const Json& j, OddModel& v) {
  j.at("q_odd").get_to(v.q_odd);
  j.at("fitted_on").get_to(v.fitted_on);
  v.sample_cap = j.value("sample_cap", std::size_t{5000});
  v.subsample_seed = j.value("subsample_seed", std::uint64_t{0});
  v.features.clear();
  for (const auto& jf : j.at("features")) {
    OddFeature f;
    jf.at("feature").get_to(f.feature);
    f.lo = jf.at("range").at(0).get<double>();
    f.hi = jf.at("range").at(1).get<double>();
    f.manual_range = jf.value("manual_range", false);
    jf.at("log_density_threshold").get_to(f.log_density_threshold);
    f.training_count = jf.value("training_count", std::size_t{0});
    f.kde = GaussianKde(jf.at("samples").get<std::vector<double>>(),
                        jf.at("bandwidth").get<double>());
    v.features.push_back(std::move(f));
  }
  v.excluded_features = j.value("excluded_features", std::vector<std::string>{});
  v.warnings = j.value("warnings", std::vector<std::string>{});
}

Json odd_summary_json(const OddModel& v) {
  Json features = Json::array();
  for (const auto& f : v.features) {
    features.push_back(Json{{"feature", f.feature},
                            {"range", {f.lo, f.hi}},
                            {"manual_range", f.manual_range},
                            {"bandwidth", f.kde.bandwidth()},
                            {"log_density_threshold", f.log_density_threshold},
                            {"training_count", f.training_count}});
  }
  return Json{{"q_odd", v.q_odd},
              {"fitted_on", v.fitted_on},
              {"method", "per-feature range check AND Gaussian KDE log-density threshold"},
              {"features", features},
              {"excluded_features", v.excluded_features},
              {"warnings", v.warnings}};
}

}  // namespace iarc
