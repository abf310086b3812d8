#include "iarc/drift.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "iarc/error.hpp"
#include "iarc/stats.hpp"

namespace iarc {

namespace {

std::vector<double> sorted_sample(std::span<const double> x, const char* which) {
  auto v = drop_missing(x);
  if (v.empty()) {
    throw Error(ErrorKind::undefined_statistic,
                fmt::format("sample '{}' is empty after dropping missing values", which));
  }
  std::sort(v.begin(), v.end());
  return v;
}

// Calls visit(x, F_a(x), F_b(x), next_x) at every distinct pooled value, in
// ascending order; next_x is +inf at the last point.
template <typename Visit>
void walk_ecdfs(const std::vector<double>& a, const std::vector<double>& b, Visit visit) {
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    double x;
    if (j >= b.size() || (i < a.size() && a[i] <= b[j])) {
      x = a[i];
    } else {
      x = b[j];
    }
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    double next = std::numeric_limits<double>::infinity();
    if (i < a.size()) next = a[i];
    if (j < b.size()) next = std::min(next, b[j]);
    visit(x, static_cast<double>(i) / na, static_cast<double>(j) / nb, next);
  }
}

}  // namespace

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  const auto sa = sorted_sample(a, "a");
  const auto sb = sorted_sample(b, "b");
  double d = 0.0;
  walk_ecdfs(sa, sb, [&](double, double fa, double fb, double) {
    d = std::max(d, std::abs(fa - fb));
  });
  return d;
}

double wasserstein1(std::span<const double> a, std::span<const double> b) {
  const auto sa = sorted_sample(a, "a");
  const auto sb = sorted_sample(b, "b");
  double total = 0.0;
  walk_ecdfs(sa, sb, [&](double x, double fa, double fb, double next) {
    if (std::isfinite(next)) total += std::abs(fa - fb) * (next - x);
  });
  return total;
}

DivergenceReport scenario_divergence(const TimeSeriesDataset& train,
                                     const TimeSeriesDataset& scenario,
                                     std::span<const std::string> features) {
  std::vector<std::string> candidates(features.begin(), features.end());
  if (candidates.empty()) candidates = train.feature_names();

  DivergenceReport report;
  report.scenario = scenario.name();
  report.dataset_version = scenario.dataset_version();
  bool any_shared = false;
  for (const auto& f : candidates) {
    const auto train_idx = train.find_feature(f);
    if (!train_idx) {
      report.warnings.push_back(fmt::format("feature '{}' not in training data; skipped", f));
      continue;
    }
    const auto scen_idx = scenario.find_feature(f);
    if (!scen_idx) {
      report.warnings.push_back(
          fmt::format("feature '{}' missing from scenario '{}'; skipped", f, scenario.name()));
      continue;
    }
    any_shared = true;
    const auto a = drop_missing(train.column(*train_idx));
    const auto b = drop_missing(scenario.column(*scen_idx));
    if (a.empty() || b.empty()) {
      report.warnings.push_back(fmt::format(
          "feature '{}' entirely missing in {} data for scenario '{}'; skipped", f,
          a.empty() ? "training" : "scenario", scenario.name()));
      continue;
    }
    FeatureDivergence fd;
    fd.feature = f;
    fd.ks_statistic = ks_statistic(a, b);
    fd.wasserstein1 = wasserstein1(a, b);
    const double sigma = std::max(sample_std(a), scale_floor(mean(a)));
    fd.normalized_wasserstein = fd.wasserstein1 / sigma;
    report.features.push_back(std::move(fd));
  }
  if (!any_shared) {
    throw Error(ErrorKind::configuration,
                fmt::format("scenario '{}' shares no features with the training data",
                            scenario.name()));
  }

  std::vector<const FeatureDivergence*> order;
  for (const auto& fd : report.features) order.push_back(&fd);
  std::sort(order.begin(), order.end(), [](const auto* x, const auto* y) {
    if (x->normalized_wasserstein != y->normalized_wasserstein) {
      return x->normalized_wasserstein > y->normalized_wasserstein;
    }
    return x->feature < y->feature;
  });
  double sum = 0.0;
  for (const auto* fd : order) {
    report.ranking.push_back(fd->feature);
    sum += fd->normalized_wasserstein;
  }
  report.score = order.empty() ? 0.0 : sum / static_cast<double>(order.size());
  return report;
}

KdeOverlay kde_overlay(std::span<const double> train_feature,
                       std::span<const double> scenario_feature, std::size_t grid_points) {
  auto kde_train = GaussianKde::fit(sorted_sample(train_feature, "train"));
  auto kde_scen = GaussianKde::fit(sorted_sample(scenario_feature, "scenario"));
  grid_points = std::max<std::size_t>(grid_points, 2);
  const double pad = 3.0 * std::max(kde_train.bandwidth(), kde_scen.bandwidth());
  const double lo = std::min(kde_train.min(), kde_scen.min()) - pad;
  const double hi = std::max(kde_train.max(), kde_scen.max()) + pad;

  KdeOverlay out;
  out.train_bandwidth = kde_train.bandwidth();
  out.scenario_bandwidth = kde_scen.bandwidth();
  out.grid.resize(grid_points);
  out.train_density.resize(grid_points);
  out.scenario_density.resize(grid_points);
  for (std::size_t k = 0; k < grid_points; ++k) {
    const double x =
        lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(grid_points - 1);
    out.grid[k] = x;
    out.train_density[k] = kde_train.density(x);
    out.scenario_density[k] = kde_scen.density(x);
  }
  return out;
}

std::vector<std::string> key_features(std::span<const DivergenceReport> reports,
                                      std::size_t count) {
  std::map<std::string, std::pair<double, int>> acc;
  for (const auto& r : reports) {
    for (const auto& fd : r.features) {
      auto& [sum, n] = acc[fd.feature];
      sum += fd.normalized_wasserstein;
      ++n;
    }
  }
  std::vector<std::pair<std::string, double>> means;
  for (const auto& [name, sn] : acc) means.emplace_back(name, sn.first / sn.second);
  std::stable_sort(means.begin(), means.end(),
                   [](const auto& x, const auto& y) { return x.second > y.second; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < means.size() && i < count; ++i) out.push_back(means[i].first);
  return out;
}

void to_json(Json& j, const FeatureDivergence& v) {
  j = Json{{"feature", v.feature},
           {"ks_statistic", v.ks_statistic},
           {"wasserstein1", v.wasserstein1},
           {"normalized_wasserstein", v.normalized_wasserstein}};
}

void from_json(const Json& j, FeatureDivergence& v) {
  j.at("feature").get_to(v.feature);
  j.at("ks_statistic").get_to(v.ks_statistic);
  j.at("wasserstein1").get_to(v.wasserstein1);
  j.at("normalized_wasserstein").get_to(v.normalized_wasserstein);
}

void to_json(Json& j, const DivergenceReport& v) {
  j = Json{{"scenario", v.scenario}, {"dataset_version", v.dataset_version},
           {"features", v.features}, {"ranking", v.ranking},
           {"score", v.score},       {"warnings", v.warnings}};
}

void from_json(const Json& j, DivergenceReport& v) {
  j.at("scenario").get_to(v.scenario);
  j.at("dataset_version").get_to(v.dataset_version);
  j.at("features").get_to(v.features);
  j.at("ranking").get_to(v.ranking);
  j.at("score").get_to(v.score);
  j.at("warnings").get_to(v.warnings);
}

void to_json(Json& j, const KdeOverlay& v) {
  j = Json{{"feature", v.feature},
           {"scenario", v.scenario},
           {"grid", v.grid},
           {"train_density", v.train_density},
           {"scenario_density", v.scenario_density},
           {"train_bandwidth", v.train_bandwidth},
           {"scenario_bandwidth", v.scenario_bandwidth}};
}

void from_json(const Json& j, KdeOverlay& v) {
  j.at("feature").get_to(v.feature);
  j.at("scenario").get_to(v.scenario);
  j.at("grid").get_to(v.grid);
  j.at("train_density").get_to(v.train_density);
  j.at("scenario_density").get_to(v.scenario_density);
  j.at("train_bandwidth").get_to(v.train_bandwidth);
  j.at("scenario_bandwidth").get_to(v.scenario_bandwidth);
}

}  // namespace iarc
