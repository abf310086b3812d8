#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "iarc/dataset.hpp"
#include "iarc/json_util.hpp"

namespace iarc {

enum class ScenarioKind { real_slice, synthetic_fault };
enum class FaultType { gaussian_noise, drift_ramp, stuck_at, spike, dropout };

/// Fault magnitudes in units of the training standard deviation of the
/// perturbed feature, each scaled by severity.
struct FaultAnchors {
  double noise_sigma = 3.0;     // gaussian_noise std
  double ramp_sigma = 3.0;      // drift_ramp end offset
  double spike_sigma = 6.0;     // spike amplitude
  double spike_rate = 0.02;     // spike probability per cell
  double dropout_rate = 0.3;    // dropout probability per cell
  double stuck_fraction = 0.5;  // stuck window length / row count

  bool operator==(const FaultAnchors&) const = default;
};

struct ScenarioSpec {
  std::string name;
  ScenarioKind kind = ScenarioKind::synthetic_fault;
  // real_slice selectors (exactly one)
  std::optional<std::string> batch_id;
  std::optional<std::pair<double, double>> time_range;  // inclusive
  // synthetic_fault parameters
  FaultType fault = FaultType::gaussian_noise;
  double severity = 1.0;
  std::vector<std::string> features;
  std::uint64_t seed = 0;

  /// Throws ErrorKind::validation.
  void validate() const;
  /// Curve grouping key: "<fault>[f1,f2]" with features sorted; slices use
  /// "real_slice".
  std::string family() const;

  bool operator==(const ScenarioSpec&) const = default;
};

struct ScenarioCatalog {
  std::string base_split = "test";
  FaultAnchors anchors;
  std::vector<ScenarioSpec> scenarios;

  const ScenarioSpec* find(std::string_view name) const;
  bool operator==(const ScenarioCatalog&) const = default;
};

/// Parses a catalog config. A "severities" list expands into one spec per
/// value named "<name>@<severity>". Empty catalogs, invalid specs, and
/// duplicate names are validation errors.
ScenarioCatalog build_catalog(const Json& config);
ScenarioCatalog load_catalog(const std::string& path);

/// Perturbs the target features of `ds`. `train_std` maps feature name to
/// the training standard deviation used as the fault scale; features absent
/// from it fall back to the standard deviation in `ds`.
TimeSeriesDataset apply_fault(const TimeSeriesDataset& ds, const ScenarioSpec& spec,
                              const std::map<std::string, double>& train_std = {},
                              const FaultAnchors& anchors = {});

/// Rows of `ds` matching the spec's batch or inclusive time range.
TimeSeriesDataset slice_scenario(const TimeSeriesDataset& ds, const ScenarioSpec& spec);

/// apply_fault or slice_scenario depending on spec.kind.
TimeSeriesDataset materialize_scenario(const TimeSeriesDataset& ds, const ScenarioSpec& spec,
                                       const std::map<std::string, double>& train_std,
                                       const FaultAnchors& anchors);

NLOHMANN_JSON_SERIALIZE_ENUM(ScenarioKind, {{ScenarioKind::real_slice, "real_slice"},
                                            {ScenarioKind::synthetic_fault, "synthetic_fault"}})
NLOHMANN_JSON_SERIALIZE_ENUM(FaultType, {{FaultType::gaussian_noise, "gaussian_noise"},
                                         {FaultType::drift_ramp, "drift_ramp"},
                                         {FaultType::stuck_at, "stuck_at"},
                                         {FaultType::spike, "spike"},
                                         {FaultType::dropout, "dropout"}})

std::string to_string(FaultType fault);

void to_json(Json& j, const FaultAnchors& v);
void from_json(const Json& j, FaultAnchors& v);
void to_json(Json& j, const ScenarioSpec& v);
void to_json(Json& j, const ScenarioCatalog& v);
void from_json(const Json& j, ScenarioCatalog& v);

}  // namespace iarc
