#include "iarc/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "iarc/error.hpp"

namespace iarc {

namespace {

constexpr double kEps = 1e-12;

const MetricValue* find_metric(const std::vector<MetricValue>& metrics, const std::string& name) {
  for (const auto& m : metrics) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

}  // namespace

double retention(double baseline_metric, double scenario_metric, Orientation orientation,
                 bool* flagged) {
  if (flagged) *flagged = false;
  if (!std::isfinite(baseline_metric)) {
    throw Error(ErrorKind::configuration, "retention needs a finite baseline metric");
  }
  if (!std::isfinite(scenario_metric)) {
    if (flagged) *flagged = true;
    return 0.0;
  }
  double r = 0.0;
  switch (orientation) {
    case Orientation::lower_better:
      r = baseline_metric / std::max(scenario_metric, kEps);
      break;
    case Orientation::higher_better:
      r = scenario_metric / std::max(baseline_metric, kEps);
      break;
    case Orientation::target:
      throw Error(ErrorKind::configuration,
                  "retention is defined for lower_better or higher_better metrics only");
  }
  return std::clamp(r, 0.0, 1.0);
}

RobustnessSummary build_summary(const std::vector<ScenarioOutcome>& results,
                                const std::vector<MetricValue>& baseline,
                                const std::string& primary_metric,
                                const std::string& model_version,
                                const std::vector<std::string>& curve_metrics) {
  const MetricValue* base = find_metric(baseline, primary_metric);
  if (!base || !base->value) {
    throw Error(ErrorKind::configuration,
                fmt::format("baseline lacks primary metric '{}'", primary_metric));
  }
  if (results.empty()) throw Error(ErrorKind::configuration, "robustness needs >= 1 scenario");

  RobustnessSummary s;
  s.model_version = model_version;
  s.primary_metric = primary_metric;
  s.orientation = base->orientation;
  s.baseline_value = *base->value;

  for (const auto& res : results) {
    const MetricValue* m = find_metric(res.metrics, primary_metric);
    if (!m) {
      s.warnings.push_back(fmt::format("scenario '{}' lacks metric '{}'; excluded",
                                       res.scenario, primary_metric));
      continue;
    }
    ScenarioRetention sr;
    sr.scenario = res.scenario;
    sr.family = res.family;
    sr.severity = res.severity;
    sr.baseline_value = s.baseline_value;
    sr.scenario_value = m->value;
    sr.retention = retention(s.baseline_value,
                             m->value.value_or(std::numeric_limits<double>::quiet_NaN()),
                             s.orientation, &sr.flagged);
    if (sr.flagged) {
      s.warnings.push_back(fmt::format("scenario '{}': non-finite '{}', retention set to 0",
                                       res.scenario, primary_metric));
    }
    s.scenarios.push_back(std::move(sr));
  }
  std::sort(s.scenarios.begin(), s.scenarios.end(),
            [](const auto& a, const auto& b) { return a.scenario < b.scenario; });
  if (s.scenarios.empty()) {
    throw Error(ErrorKind::configuration,
                fmt::format("no scenario reports primary metric '{}'", primary_metric));
  }

  double total = 0.0;
  std::map<std::string, std::pair<double, int>> fam;
  for (const auto& sr : s.scenarios) {
    total += sr.retention;
    auto& [sum, n] = fam[sr.family];
    sum += sr.retention;
    ++n;
  }
  s.aggregated_robustness = total / static_cast<double>(s.scenarios.size());
  for (const auto& [name, sn] : fam) s.family_mean_retention[name] = sn.first / sn.second;

  std::vector<const ScenarioRetention*> order;
  for (const auto& sr : s.scenarios) order.push_back(&sr);
  std::stable_sort(order.begin(), order.end(),
                   [](const auto* a, const auto* b) { return a->retention < b->retention; });
  for (const auto* sr : order) s.weakest_scenarios.push_back(sr->scenario);

  const std::vector<std::string> metrics =
      curve_metrics.empty() ? std::vector<std::string>{primary_metric} : curve_metrics;
  std::set<std::string> families;
  for (const auto& res : results) {
    if (res.severity) families.insert(res.family);
  }
  for (const auto& family : families) {
    for (const auto& metric : metrics) {
      SeverityCurve curve;
      curve.family = family;
      curve.metric = metric;
      curve.model_version = model_version;
      const MetricValue* metric_base = find_metric(baseline, metric);
      for (const auto& res : results) {
        if (res.family != family || !res.severity) continue;
        const MetricValue* m = find_metric(res.metrics, metric);
        if (!m || !m->value) continue;
        CurvePoint pt;
        pt.severity = *res.severity;
        pt.value = *m->value;
        if (metric_base && metric_base->value && m->orientation != Orientation::target) {
          pt.retention = retention(*metric_base->value, *m->value, m->orientation);
        }
        curve.points.push_back(pt);
      }
      std::stable_sort(curve.points.begin(), curve.points.end(),
                       [](const auto& a, const auto& b) { return a.severity < b.severity; });
      const auto dup = std::adjacent_find(curve.points.begin(), curve.points.end(),
                                          [](const auto& a, const auto& b) {
                                            return a.severity == b.severity;
                                          });
      if (dup != curve.points.end()) {
        s.warnings.push_back(fmt::format(
            "family '{}' has repeated severity {}; no '{}' curve built", family,
            dup->severity, metric));
        continue;
      }
      if (curve.points.size() >= 2) s.curves.push_back(std::move(curve));
    }
  }
  return s;
}

VersionComparison compare_versions(std::vector<VersionEntry> entries) {
  if (entries.empty()) throw Error(ErrorKind::comparison, "no model versions to compare");
  std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.date != b.date) return a.date < b.date;
    return a.model_version < b.model_version;
  });
  std::set<std::string> common;
  for (const auto& sr : entries.front().summary.scenarios) common.insert(sr.scenario);
  for (std::size_t v = 1; v < entries.size(); ++v) {
    std::set<std::string> mine;
    for (const auto& sr : entries[v].summary.scenarios) mine.insert(sr.scenario);
    std::set<std::string> both;
    std::set_intersection(common.begin(), common.end(), mine.begin(), mine.end(),
                          std::inserter(both, both.begin()));
    common = std::move(both);
  }
  if (common.empty()) {
    throw Error(ErrorKind::comparison, "model versions share no evaluated scenario");
  }
  VersionComparison cmp;
  cmp.scenarios.assign(common.begin(), common.end());
  for (const auto& e : entries) {
    cmp.versions.push_back(e.model_version);
    cmp.dates.push_back(e.date);
  }
  cmp.retention.assign(cmp.scenarios.size(), std::vector<double>(entries.size(), 0.0));
  cmp.aggregated.assign(entries.size(), 0.0);
  for (std::size_t v = 0; v < entries.size(); ++v) {
    for (const auto& sr : entries[v].summary.scenarios) {
      const auto it = std::lower_bound(cmp.scenarios.begin(), cmp.scenarios.end(), sr.scenario);
      if (it == cmp.scenarios.end() || *it != sr.scenario) continue;
      const auto s = static_cast<std::size_t>(it - cmp.scenarios.begin());
      cmp.retention[s][v] = sr.retention;
      cmp.aggregated[v] += sr.retention;
    }
    cmp.aggregated[v] /= static_cast<double>(cmp.scenarios.size());
  }
  return cmp;
}

void to_json(Json& j, const ScenarioRetention& v) {
  j = Json{{"scenario", v.scenario},
           {"family", v.family},
           {"severity", v.severity},
           {"baseline_value", v.baseline_value},
           {"scenario_value", v.scenario_value},
           {"retention", v.retention},
           {"flagged", v.flagged}};
}

void from_json(const Json& j, ScenarioRetention& v) {
  j.at("scenario").get_to(v.scenario);
  j.at("family").get_to(v.family);
  j.at("severity").get_to(v.severity);
  j.at("baseline_value").get_to(v.baseline_value);
  j.at("scenario_value").get_to(v.scenario_value);
  j.at("retention").get_to(v.retention);
  j.at("flagged").get_to(v.flagged);
}

void to_json(Json& j, const CurvePoint& v) {
  j = Json{{"severity", v.severity}, {"value", v.value}, {"retention", v.retention}};
}

void from_json(const Json& j, CurvePoint& v) {
  j.at("severity").get_to(v.severity);
  j.at("value").get_to(v.value);
  j.at("retention").get_to(v.retention);
}

void to_json(Json& j, const SeverityCurve& v) {
  j = Json{{"family", v.family},
           {"metric", v.metric},
           {"model_version", v.model_version},
           {"points", v.points}};
}

void from_json(const Json& j, SeverityCurve& v) {
  j.at("family").get_to(v.family);
  j.at("metric").get_to(v.metric);
  j.at("model_version").get_to(v.model_version);
  j.at("points").get_to(v.points);
}

void to_json(Json& j, const RobustnessSummary& v) {
  j = Json{{"model_version", v.model_version},
           {"primary_metric", v.primary_metric},
           {"orientation", v.orientation},
           {"baseline_value", v.baseline_value},
           {"scenarios", v.scenarios},
           {"family_mean_retention", v.family_mean_retention},
           {"aggregated_robustness", v.aggregated_robustness},
           {"weakest_scenarios", v.weakest_scenarios},
           {"curves", v.curves},
           {"warnings", v.warnings}};
}

void from_json(const Json& j, RobustnessSummary& v) {
  j.at("model_version").get_to(v.model_version);
  j.at("primary_metric").get_to(v.primary_metric);
  j.at("orientation").get_to(v.orientation);
  j.at("baseline_value").get_to(v.baseline_value);
  j.at("scenarios").get_to(v.scenarios);
  j.at("family_mean_retention").get_to(v.family_mean_retention);
  j.at("aggregated_robustness").get_to(v.aggregated_robustness);
  j.at("weakest_scenarios").get_to(v.weakest_scenarios);
  j.at("curves").get_to(v.curves);
  j.at("warnings").get_to(v.warnings);
}

void to_json(Json& j, const VersionComparison& v) {
  j = Json{{"versions", v.versions},   {"dates", v.dates},
           {"scenarios", v.scenarios}, {"retention", v.retention},
           {"aggregated", v.aggregated}};
}

void from_json(const Json& j, VersionComparison& v) {
  j.at("versions").get_to(v.versions);
  j.at("dates").get_to(v.dates);
  j.at("scenarios").get_to(v.scenarios);
  j.at("retention").get_to(v.retention);
  j.at("aggregated").get_to(v.aggregated);
}

}  // namespace iarc
