#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "iarc/json_util.hpp"
#include "iarc/metrics.hpp"

namespace iarc {

/// Clamped performance ratio in [0, 1]. lower_better: baseline / max(scenario, eps);
/// higher_better: scenario / max(baseline, eps), eps = 1e-12. A non-finite
/// scenario value yields 0 and sets *flagged.
double retention(double baseline_metric, double scenario_metric, Orientation orientation,
                 bool* flagged = nullptr);

/// Metrics of one scenario evaluation.
struct ScenarioOutcome {
  std::string scenario;
  std::string family;               // ScenarioSpec::family()
  std::optional<double> severity;   // empty for real slices
  std::vector<MetricValue> metrics;
};

struct ScenarioRetention {
  std::string scenario;
  std::string family;
  std::optional<double> severity;
  double baseline_value = 0.0;
  std::optional<double> scenario_value;
  double retention = 0.0;
  bool flagged = false;

  bool operator==(const ScenarioRetention&) const = default;
};

struct CurvePoint {
  double severity = 0.0;
  double value = 0.0;
  std::optional<double> retention;  // empty for target-oriented metrics

  bool operator==(const CurvePoint&) const = default;
};

struct SeverityCurve {
  std::string family;
  std::string metric;
  std::string model_version;
  std::vector<CurvePoint> points;  // strictly increasing severity, >= 2 points

  bool operator==(const SeverityCurve&) const = default;
};

struct RobustnessSummary {
  std::string model_version;
  std::string primary_metric;
  Orientation orientation = Orientation::lower_better;
  double baseline_value = 0.0;
  std::vector<ScenarioRetention> scenarios;  // by name
  std::map<std::string, double> family_mean_retention;
  double aggregated_robustness = 1.0;        // unweighted mean retention
  std::vector<std::string> weakest_scenarios;  // ascending retention, ties by name
  std::vector<SeverityCurve> curves;
  std::vector<std::string> warnings;

  bool operator==(const RobustnessSummary&) const = default;
};

/// Retentions on `primary_metric`; scenarios lacking it are excluded with a
/// warning. Curves are built per family for each metric in `curve_metrics`
/// (the primary metric when empty).
RobustnessSummary build_summary(const std::vector<ScenarioOutcome>& results,
                                const std::vector<MetricValue>& baseline,
                                const std::string& primary_metric,
                                const std::string& model_version,
                                const std::vector<std::string>& curve_metrics = {});

struct VersionEntry {
  std::string model_version;
  std::string date;  // ISO date; orders the comparison
  RobustnessSummary summary;
};

struct VersionComparison {
  std::vector<std::string> versions;   // by date, then version
  std::vector<std::string> dates;
  std::vector<std::string> scenarios;  // common scenario set, by name
  /// retention[s][v] for scenarios[s] and versions[v]
  std::vector<std::vector<double>> retention;
  std::vector<double> aggregated;      // per version, over the common set

  bool operator==(const VersionComparison&) const = default;
};

/// Scenario x version retention matrix over the scenarios every version has.
VersionComparison compare_versions(std::vector<VersionEntry> entries);

void to_json(Json& j, const ScenarioRetention& v);
void from_json(const Json& j, ScenarioRetention& v);
void to_json(Json& j, const CurvePoint& v);
void from_json(const Json& j, CurvePoint& v);
void to_json(Json& j, const SeverityCurve& v);
void from_json(const Json& j, SeverityCurve& v);
void to_json(Json& j, const RobustnessSummary& v);
void from_json(const Json& j, RobustnessSummary& v);
void to_json(Json& j, const VersionComparison& v);
void from_json(const Json& j, VersionComparison& v);

}  // namespace iarc
