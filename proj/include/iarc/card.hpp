#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "iarc/dataset.hpp"
#include "iarc/drift.hpp"
#include "iarc/json_util.hpp"
#include "iarc/metrics.hpp"
#include "iarc/odd.hpp"
#include "iarc/quality.hpp"
#include "iarc/robustness.hpp"
#include "iarc/scenarios.hpp"

namespace iarc {

inline constexpr const char* kCardSchemaVersion = "1.0";

// EU AI Act references attached to each card section.
inline constexpr const char* kRegulationGeneral = "Art. 11, 13 (3), Annex IV";
inline constexpr const char* kRegulationIntendedUse = "Art. 13";
inline constexpr const char* kRegulationData = "Art. 10 (2/3/4), 11, Annex IV (2.a)";
inline constexpr const char* kRegulationEvaluation = "Art. 9 (6-8), 13 (3.b), 15 (1-4)";
inline constexpr const char* kRegulationLimitations = "Art. 13 (b), Annex IX";

struct GeneralInformation {
  std::string regulation = kRegulationGeneral;
  std::string model_name;
  std::string model_version;
  std::string dataset_name;
  std::string dataset_version;
  std::string date;
  std::string provider;
  std::string deployment_context;
  RunStamp run_stamp;
};

struct IntendedUse {
  std::string regulation = kRegulationIntendedUse;
  std::string description;
  std::vector<std::string> out_of_scope_uses;
};

struct OddCoverageEntry {
  std::string slice_name;
  double fraction = 0.0;
  std::size_t rows = 0;
  std::size_t inside = 0;
};

struct OddSection {
  Json model;  // odd_summary_json
  std::vector<OddCoverageEntry> coverage;
};

struct DistributionalDiagnostics {
  std::vector<std::string> key_features;
  std::vector<DivergenceReport> divergence;
  std::vector<KdeOverlay> kde_overlays;
};

struct DataSection {
  std::string regulation = kRegulationData;
  std::string overview;
  Json provenance;
  std::string preprocessing_notes;
  QualityReport quality_raw;
  QualityReport quality_preprocessed;
  Json split_config = Json::object();
  std::map<std::string, std::size_t> split_sizes;
  OddSection odd;
  ScenarioCatalog scenario_catalog;
  DistributionalDiagnostics diagnostics;
};

struct AcceptanceThreshold {
  std::string metric;
  std::string model_version;
  std::string slice_name;
  Orientation orientation = Orientation::lower_better;
  std::optional<double> value;
  double threshold = 0.0;
  bool passed = false;
};

/// value <= threshold (lower_better) or value >= threshold (higher_better);
/// an undefined value never passes.
bool threshold_passes(Orientation orientation, std::optional<double> value, double threshold);

struct RobustnessSection {
  std::vector<RobustnessSummary> summaries;  // one per model version
  std::optional<VersionComparison> comparison;
};

struct EvaluationSection {
  std::string regulation = kRegulationEvaluation;
  std::string primary_metric;
  std::vector<AcceptanceThreshold> kpis;
  std::vector<UqReport> uq;
  RobustnessSection robustness;
  std::vector<std::string> methodology_notes;
};

struct IarcDocument {
  std::string schema_version = kCardSchemaVersion;
  GeneralInformation general_information;
  IntendedUse intended_use;
  DataSection data;
  EvaluationSection evaluation;
  std::vector<std::string> limitations;
};

// ---------------------------------------------------------------------------
// User metadata
// ---------------------------------------------------------------------------

struct ThresholdSpec {
  std::string metric;
  double threshold = 0.0;
  std::string slice_name = "test";
  std::optional<std::string> model_version;  // all versions when empty
};

struct VersionDate {
  std::string model_version;
  std::string date;
};

struct CardMetadata {
  std::string model_name;
  std::string model_version;  // the version the card documents
  std::string date;
  std::string provider;
  std::string deployment_context;
  std::string code_version = "unversioned";
  std::string intended_use;
  std::vector<std::string> out_of_scope_uses;
  std::string data_overview;
  std::string preprocessing_notes;
  std::vector<std::string> limitations;
  std::vector<ThresholdSpec> thresholds;
  std::vector<VersionDate> model_versions;  // dates for the version comparison

  /// Date for `version`; falls back to the card date.
  std::string date_of(const std::string& version) const;
};

/// Parses the metadata layout (general_information, intended_use, data,
/// limitations, acceptance_thresholds, model_versions). A missing mandatory
/// field throws ErrorKind::validation naming its card JSON pointer.
CardMetadata parse_metadata(const Json& j);
CardMetadata load_metadata(const std::string& path);

// ---------------------------------------------------------------------------
// Assembly, serialization, validation
// ---------------------------------------------------------------------------

struct CardInputs {
  CardMetadata metadata;
  RunStamp run_stamp;
  std::string dataset_name;
  std::string dataset_version;
  Json provenance;
  QualityReport quality_raw;
  QualityReport quality_preprocessed;
  Json split_config = Json::object();
  std::map<std::string, std::size_t> split_sizes;
  OddModel odd;
  std::vector<OddCoverageEntry> odd_coverage;
  ScenarioCatalog catalog;
  DistributionalDiagnostics diagnostics;
  std::string primary_metric = "mae";
  std::vector<UqReport> uq;
  std::vector<RobustnessSummary> robustness;
  std::optional<VersionComparison> comparison;
  /// Pipeline-level caveats (surrogate data, imputation, ...).
  std::vector<std::string> notes;
};

/// Deterministic assembly: thresholds evaluated, warnings funneled into
/// limitations, methodology notes attached.
IarcDocument assemble_card(const CardInputs& inputs);

void to_json(Json& j, const IarcDocument& doc);
void from_json(const Json& j, IarcDocument& doc);
void to_json(Json& j, const AcceptanceThreshold& v);
void from_json(const Json& j, AcceptanceThreshold& v);
void to_json(Json& j, const OddCoverageEntry& v);
void from_json(const Json& j, OddCoverageEntry& v);

/// Canonical JSON text (sorted keys, shortest round-trip numbers, trailing newline).
std::string serialize_json(const IarcDocument& doc);
/// Throws ErrorKind::parse on malformed text or a shape mismatch.
IarcDocument parse_card(std::string_view text);

struct CardViolation {
  std::string pointer;
  std::string kind;  // schema | missing_section | consistency | parse
  std::string message;
};

struct CardValidation {
  bool passed = true;
  std::vector<CardViolation> violations;
};

/// Shipped JSON-Schema plus document invariants.
CardValidation validate_card(const Json& card);
CardValidation validate_card(const IarcDocument& doc);
CardValidation validate_card_text(std::string_view text);

/// The schema compiled into the library.
const Json& card_schema();

}  // namespace iarc
