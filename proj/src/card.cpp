#include "iarc/card.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "iarc/card_schema.hpp"
#include "iarc/error.hpp"
#include "iarc/schema_check.hpp"

namespace iarc {

bool threshold_passes(Orientation orientation, std::optional<double> value, double threshold) {
  if (!value || !std::isfinite(*value)) return false;
  switch (orientation) {
    case Orientation::lower_better:
      return *value <= threshold;
    case Orientation::higher_better:
      return *value >= threshold;
    case Orientation::target:
      break;
  }
  return false;
}

std::string CardMetadata::date_of(const std::string& version) const {
  for (const auto& v : model_versions) {
    if (v.model_version == version) return v.date;
  }
  return date;
}

// ---------------------------------------------------------------------------
// Metadata

namespace {

std::string required_text(const Json& obj, const std::string& section, const char* key) {
  const std::string pointer = fmt::format("/{}/{}", section, key);
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_string() || it->get<std::string>().empty()) {
    throw Error(ErrorKind::validation,
                fmt::format("metadata: missing required field at {}", pointer));
  }
  return it->get<std::string>();
}

const Json& required_section(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_object()) {
    throw Error(ErrorKind::validation,
                fmt::format("metadata: missing required section at /{}", key));
  }
  return *it;
}

std::vector<std::string> string_list(const Json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return {};
  if (!it->is_array()) {
    throw Error(ErrorKind::validation, fmt::format("metadata: {}/{} must be a list", where, key));
  }
  std::vector<std::string> out;
  for (const auto& v : *it) {
    if (!v.is_string()) {
      throw Error(ErrorKind::validation,
                  fmt::format("metadata: {}/{} must hold strings", where, key));
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace

CardMetadata parse_metadata(const Json& j) {
  if (!j.is_object()) throw Error(ErrorKind::validation, "metadata: top level must be an object");
  CardMetadata m;
  const Json& gi = required_section(j, "general_information");
  m.model_name = required_text(gi, "general_information", "model_name");
  m.model_version = required_text(gi, "general_information", "model_version");
  m.date = required_text(gi, "general_information", "date");
  m.provider = required_text(gi, "general_information", "provider");
  m.deployment_context = required_text(gi, "general_information", "deployment_context");
  if (gi.contains("code_version")) m.code_version = required_text(gi, "general_information", "code_version");

  const Json& iu = required_section(j, "intended_use");
  m.intended_use = required_text(iu, "intended_use", "description");
  m.out_of_scope_uses = string_list(iu, "out_of_scope_uses", "/intended_use");

  const Json& data = required_section(j, "data");
  m.data_overview = required_text(data, "data", "overview");
  if (auto it = data.find("preprocessing_notes"); it != data.end()) {
    m.preprocessing_notes = it->get<std::string>();
  }
  m.limitations = string_list(j, "limitations", "");

  if (auto it = j.find("acceptance_thresholds"); it != j.end()) {
    for (std::size_t i = 0; i < it->size(); ++i) {
      const Json& t = (*it)[i];
      const std::string where = fmt::format("acceptance_thresholds/{}", i);
      ThresholdSpec spec;
      spec.metric = required_text(t, where, "metric");
      if (!t.contains("threshold") || !t["threshold"].is_number()) {
        throw Error(ErrorKind::validation,
                    fmt::format("metadata: missing required field at /{}/threshold", where));
      }
      spec.threshold = t["threshold"].get<double>();
      if (t.contains("slice_name")) spec.slice_name = required_text(t, where, "slice_name");
      if (t.contains("model_version")) spec.model_version = required_text(t, where, "model_version");
      m.thresholds.push_back(std::move(spec));
    }
  }
  if (auto it = j.find("model_versions"); it != j.end()) {
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string where = fmt::format("model_versions/{}", i);
      m.model_versions.push_back({required_text((*it)[i], where, "model_version"),
                                  required_text((*it)[i], where, "date")});
    }
  }
  return m;
}

CardMetadata load_metadata(const std::string& path) { return parse_metadata(read_json_file(path)); }

// ---------------------------------------------------------------------------
// Assembly

namespace {

void add_unique(std::vector<std::string>& out, std::set<std::string>& seen, std::string s) {
  if (seen.insert(s).second) out.push_back(std::move(s));
}


}  // namespace

IarcDocument assemble_card(const CardInputs& in) {
  const CardMetadata& md = in.metadata;
  if (in.uq.empty()) {
    throw Error(ErrorKind::validation, "card: at least one evaluated slice is required at /evaluation/uq");
  }
  if (in.dataset_name.empty() || in.dataset_version.empty()) {
    throw Error(ErrorKind::validation,
                "card: dataset identity missing at /general_information/dataset_version");
  }

  IarcDocument doc;
  auto& gi = doc.general_information;
  gi.model_name = md.model_name;
  gi.model_version = md.model_version;
  gi.dataset_name = in.dataset_name;
  gi.dataset_version = in.dataset_version;
  gi.date = md.date;
  gi.provider = md.provider;
  gi.deployment_context = md.deployment_context;
  gi.run_stamp = in.run_stamp;
  if (gi.run_stamp.code_version.empty() || gi.run_stamp.tool_version.empty() ||
      gi.run_stamp.created_at.empty()) {
    throw Error(ErrorKind::validation, "card: incomplete run stamp at /general_information/run_stamp");
  }

  doc.intended_use.description = md.intended_use;
  doc.intended_use.out_of_scope_uses = md.out_of_scope_uses;

  auto& data = doc.data;
  data.overview = md.data_overview;
  data.provenance = in.provenance;
  data.preprocessing_notes = md.preprocessing_notes;
  data.quality_raw = in.quality_raw;
  data.quality_preprocessed = in.quality_preprocessed;
  data.split_config = in.split_config;
  data.split_sizes = in.split_sizes;
  data.odd.model = odd_summary_json(in.odd);
  data.odd.coverage = in.odd_coverage;
  data.scenario_catalog = in.catalog;
  data.diagnostics = in.diagnostics;

  auto& ev = doc.evaluation;
  ev.primary_metric = in.primary_metric;
  ev.uq = in.uq;
  ev.robustness.summaries = in.robustness;
  ev.robustness.comparison = in.comparison;

  for (const auto& spec : md.thresholds) {
    bool matched = false;
    for (const auto& report : in.uq) {
      if (report.slice_name != spec.slice_name) continue;
      if (spec.model_version && report.model_version != *spec.model_version) continue;
      const MetricValue* mv = report.metric(spec.metric);
      if (!mv) continue;
      if (mv->orientation == Orientation::target) {
        throw Error(ErrorKind::configuration,
                    fmt::format("acceptance threshold on '{}' needs a lower_better or "
                                "higher_better metric",
                                spec.metric));
      }
      matched = true;
      AcceptanceThreshold t;
      t.metric = spec.metric;
      t.model_version = report.model_version;
      t.slice_name = report.slice_name;
      t.orientation = mv->orientation;
      t.value = mv->value;
      t.threshold = spec.threshold;
      t.passed = threshold_passes(t.orientation, t.value, t.threshold);
      ev.kpis.push_back(std::move(t));
    }
    if (!matched) {
      throw Error(ErrorKind::validation,
                  fmt::format("acceptance threshold on '{}' matches no evaluated slice '{}'",
                              spec.metric, spec.slice_name));
    }
  }

  const double q_odd = in.odd.q_odd;
  ev.methodology_notes = {
      fmt::format("Retention on the primary metric ({}): baseline / scenario for lower_better "
                  "metrics and scenario / baseline for higher_better metrics, clamped to [0, 1]. "
                  "The aggregated robustness score is the unweighted mean retention over all "
                  "scenarios; this formula is defined by the tool.",
                  in.primary_metric),
      fmt::format("ODD membership: every feature within its training range and with a Gaussian "
                  "KDE log-density at or above the {} quantile of the training self-log-densities.",
                  format_number(q_odd)),
      "Regression intervals are recalibrated with split conformal prediction on the calibration "
      "split, using the score max(q_lo - y, y - q_hi) per symmetric quantile pair.",
      "WIS: sum over symmetric quantile pairs of (alpha/2) * interval score plus half the absolute "
      "error of the median, divided by K + 1/2.",
      "Classification scores floor probabilities at 1e-12 in the NLL; ECE uses equal-width "
      "confidence bins.",
      "Drift: two-sample Kolmogorov-Smirnov statistic and Wasserstein-1 distance per feature, "
      "W1 normalized by the training standard deviation.",
      fmt::format("Every stochastic step derives its seed from master seed {} and a component name.",
                  in.run_stamp.seed)};

  // Limitations: tool caveats, auto-collected warnings, then user text.
  std::vector<std::string>& lim = doc.limitations;
  std::set<std::string> seen;
  add_unique(lim, seen,
             "The ODD is marginal: each feature is checked on its own, so unusual combinations of "
             "individually in-range values are not detected.");
  add_unique(lim, seen,
             "Stress scenarios perturb input features only; the target variable is never "
             "perturbed.");
  const bool has_classification = std::any_of(in.uq.begin(), in.uq.end(), [](const UqReport& r) {
    return r.task == Task::classification;
  });
  if (has_classification) {
    add_unique(lim, seen,
               "Classification recalibration uses temperature scaling only; isotonic regression "
               "is not offered.");
  }
  for (const auto& n : in.notes) add_unique(lim, seen, n);
  for (const auto& w : in.odd.warnings) add_unique(lim, seen, "ODD: " + w);
  for (const auto& f : in.odd.excluded_features) {
    add_unique(lim, seen, fmt::format("ODD: feature '{}' is excluded from the ODD", f));
  }
  for (const auto& r : in.diagnostics.divergence) {
    for (const auto& w : r.warnings) add_unique(lim, seen, fmt::format("Drift {}: {}", r.scenario, w));
  }
  for (const auto& r : in.uq) {
    for (const auto& w : r.warnings) {
      add_unique(lim, seen, fmt::format("UQ {}/{}: {}", r.model_version, r.slice_name, w));
    }
  }
  for (const auto& s : in.robustness) {
    for (const auto& w : s.warnings) {
      add_unique(lim, seen, fmt::format("Robustness {}: {}", s.model_version, w));
    }
  }
  for (const auto& l : md.limitations) add_unique(lim, seen, l);
  return doc;
}

// ---------------------------------------------------------------------------
// JSON

void to_json(Json& j, const AcceptanceThreshold& v) {
  j = Json{{"metric", v.metric},         {"model_version", v.model_version},
           {"slice_name", v.slice_name}, {"orientation", v.orientation},
           {"value", v.value},           {"threshold", v.threshold},
           {"passed", v.passed}};
}

void from_json(const Json& j, AcceptanceThreshold& v) {
  j.at("metric").get_to(v.metric);
  j.at("model_version").get_to(v.model_version);
  j.at("slice_name").get_to(v.slice_name);
  j.at("orientation").get_to(v.orientation);
  j.at("value").get_to(v.value);
  j.at("threshold").get_to(v.threshold);
  j.at("passed").get_to(v.passed);
}

void to_json(Json& j, const OddCoverageEntry& v) {
  j = Json{{"slice_name", v.slice_name}, {"fraction", v.fraction}, {"rows", v.rows},
           {"inside", v.inside}};
}

void from_json(const Json& j, OddCoverageEntry& v) {
  j.at("slice_name").get_to(v.slice_name);
  j.at("fraction").get_to(v.fraction);
  j.at("rows").get_to(v.rows);
  j.at("inside").get_to(v.inside);
}

void to_json(Json& j, const IarcDocument& d) {
  const auto& gi = d.general_information;
  const auto& data = d.data;
  const auto& ev = d.evaluation;
  j = Json{
      {"schema_version", d.schema_version},
      {"general_information",
       {{"regulation", gi.regulation},
        {"model_name", gi.model_name},
        {"model_version", gi.model_version},
        {"dataset_name", gi.dataset_name},
        {"dataset_version", gi.dataset_version},
        {"date", gi.date},
        {"provider", gi.provider},
        {"deployment_context", gi.deployment_context},
        {"run_stamp", gi.run_stamp}}},
      {"intended_use",
       {{"regulation", d.intended_use.regulation},
        {"description", d.intended_use.description},
        {"out_of_scope_uses", d.intended_use.out_of_scope_uses}}},
      {"data",
       {{"regulation", data.regulation},
        {"overview", data.overview},
        {"provenance", data.provenance},
        {"preprocessing_notes", data.preprocessing_notes},
        {"quality", {{"raw", data.quality_raw}, {"preprocessed", data.quality_preprocessed}}},
        {"splits", {{"config", data.split_config}, {"sizes", data.split_sizes}}},
        {"odd", {{"model", data.odd.model}, {"coverage", data.odd.coverage}}},
        {"scenario_catalog", data.scenario_catalog},
        {"distributional_diagnostics",
         {{"key_features", data.diagnostics.key_features},
          {"divergence", data.diagnostics.divergence},
          {"kde_overlays", data.diagnostics.kde_overlays}}}}},
      {"evaluation",
       {{"regulation", ev.regulation},
        {"primary_metric", ev.primary_metric},
        {"kpis", ev.kpis},
        {"uq", ev.uq},
        {"robustness",
         {{"summaries", ev.robustness.summaries}, {"comparison", ev.robustness.comparison}}},
        {"methodology_notes", ev.methodology_notes}}},
      {"limitations", d.limitations}};
}

void from_json(const Json& j, IarcDocument& d) {
  j.at("schema_version").get_to(d.schema_version);
  const Json& gi = j.at("general_information");
  auto& g = d.general_information;
  gi.at("regulation").get_to(g.regulation);
  gi.at("model_name").get_to(g.model_name);
  gi.at("model_version").get_to(g.model_version);
  gi.at("dataset_name").get_to(g.dataset_name);
  gi.at("dataset_version").get_to(g.dataset_version);
  gi.at("date").get_to(g.date);
  gi.at("provider").get_to(g.provider);
  gi.at("deployment_context").get_to(g.deployment_context);
  gi.at("run_stamp").get_to(g.run_stamp);

  const Json& iu = j.at("intended_use");
  iu.at("regulation").get_to(d.intended_use.regulation);
  iu.at("description").get_to(d.intended_use.description);
  iu.at("out_of_scope_uses").get_to(d.intended_use.out_of_scope_uses);

  const Json& data = j.at("data");
  auto& ds = d.data;
  data.at("regulation").get_to(ds.regulation);
  data.at("overview").get_to(ds.overview);
  ds.provenance = data.at("provenance");
  data.at("preprocessing_notes").get_to(ds.preprocessing_notes);
  data.at("quality").at("raw").get_to(ds.quality_raw);
  data.at("quality").at("preprocessed").get_to(ds.quality_preprocessed);
  ds.split_config = data.at("splits").at("config");
  data.at("splits").at("sizes").get_to(ds.split_sizes);
  ds.odd.model = data.at("odd").at("model");
  data.at("odd").at("coverage").get_to(ds.odd.coverage);
  data.at("scenario_catalog").get_to(ds.scenario_catalog);
  const Json& diag = data.at("distributional_diagnostics");
  diag.at("key_features").get_to(ds.diagnostics.key_features);
  diag.at("divergence").get_to(ds.diagnostics.divergence);
  diag.at("kde_overlays").get_to(ds.diagnostics.kde_overlays);

  const Json& ev = j.at("evaluation");
  auto& e = d.evaluation;
  ev.at("regulation").get_to(e.regulation);
  ev.at("primary_metric").get_to(e.primary_metric);
  ev.at("kpis").get_to(e.kpis);
  ev.at("uq").get_to(e.uq);
  ev.at("robustness").at("summaries").get_to(e.robustness.summaries);
  ev.at("robustness").at("comparison").get_to(e.robustness.comparison);
  ev.at("methodology_notes").get_to(e.methodology_notes);

  j.at("limitations").get_to(d.limitations);
}

std::string serialize_json(const IarcDocument& doc) { return canonical_dump(Json(doc)); }

IarcDocument parse_card(std::string_view text) {
  try {
    return Json::parse(text).get<IarcDocument>();
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::parse, fmt::format("card JSON: {}", e.what()));
  }
}

// ---------------------------------------------------------------------------
// Validation

const Json& card_schema() {
  static const Json schema = Json::parse(detail::kCardSchemaText);
  return schema;
}

namespace {

const std::set<std::string> kSections = {"general_information", "intended_use", "data",
                                         "evaluation", "limitations"};

bool in_limitations(const Json& limitations, const std::string& warning) {
  for (const auto& l : limitations) {
    if (l.get_ref<const std::string&>().find(warning) != std::string::npos) return true;
  }
  return false;
}

void check_invariants(const Json& card, std::vector<CardViolation>& out) {
  const Json& ev = card.at("evaluation");
  const auto& kpis = ev.at("kpis");
  for (std::size_t i = 0; i < kpis.size(); ++i) {
    const Json& k = kpis[i];
    const auto orientation = k.at("orientation").get<Orientation>();
    std::optional<double> value;
    if (!k.at("value").is_null()) value = k.at("value").get<double>();
    const bool expect = threshold_passes(orientation, value, k.at("threshold").get<double>());
    if (expect != k.at("passed").get<bool>()) {
      out.push_back({fmt::format("/evaluation/kpis/{}/passed", i), "consistency",
                     fmt::format("passed = {} is inconsistent with value {} vs threshold {} ({})",
                                 k.at("passed").dump(), k.at("value").dump(),
                                 k.at("threshold").dump(), k.at("orientation").dump())});
    }
  }

  const Json& limitations = card.at("limitations");
  const auto require_listed = [&](const Json& warnings, const std::string& pointer) {
    for (std::size_t i = 0; i < warnings.size(); ++i) {
      const auto& w = warnings[i].get_ref<const std::string&>();
      if (!in_limitations(limitations, w)) {
        out.push_back({fmt::format("{}/{}", pointer, i), "consistency",
                       "warning is not listed under limitations"});
      }
    }
  };

  const auto& sums = ev.at("robustness").at("summaries");
  for (std::size_t s = 0; s < sums.size(); ++s) {
    const Json& sum = sums[s];
    const auto& scen = sum.at("scenarios");
    double acc = 0.0;
    for (const auto& r : scen) acc += r.at("retention").get<double>();
    const double expect = scen.empty() ? 1.0 : acc / static_cast<double>(scen.size());
    const double got = sum.at("aggregated_robustness").get<double>();
    if (std::abs(expect - got) > 1e-9) {
      out.push_back({fmt::format("/evaluation/robustness/summaries/{}/aggregated_robustness", s),
                     "consistency",
                     fmt::format("aggregated robustness {} differs from mean retention {}", got,
                                 expect)});
    }
    require_listed(sum.at("warnings"), fmt::format("/evaluation/robustness/summaries/{}/warnings", s));
  }

  const Json& cmp = ev.at("robustness").at("comparison");
  if (!cmp.is_null()) {
    const std::size_t nv = cmp.at("versions").size();
    bool ok = cmp.at("dates").size() == nv && cmp.at("aggregated").size() == nv &&
              cmp.at("retention").size() == cmp.at("scenarios").size();
    for (const auto& row : cmp.at("retention")) ok = ok && row.size() == nv;
    if (!ok) {
      out.push_back({"/evaluation/robustness/comparison", "consistency",
                     "comparison matrix shape does not match its versions and scenarios"});
    }
  }

  const auto& uq = ev.at("uq");
  for (std::size_t i = 0; i < uq.size(); ++i) {
    require_listed(uq[i].at("warnings"), fmt::format("/evaluation/uq/{}/warnings", i));
  }
  require_listed(card.at("data").at("odd").at("model").at("warnings"), "/data/odd/model/warnings");
  const auto& div = card.at("data").at("distributional_diagnostics").at("divergence");
  for (std::size_t i = 0; i < div.size(); ++i) {
    require_listed(div[i].at("warnings"),
                   fmt::format("/data/distributional_diagnostics/divergence/{}/warnings", i));
  }
}

}  // namespace

CardValidation validate_card(const Json& card) {
  static const SchemaValidator validator(card_schema());
  CardValidation result;
  for (auto& v : validator.validate(card)) {
    const bool section = v.message == "required field is missing" &&
                         kSections.count(v.pointer.substr(1)) > 0;
    result.violations.push_back(
        {std::move(v.pointer), section ? "missing_section" : "schema", std::move(v.message)});
  }
  if (result.violations.empty()) {
    try {
      check_invariants(card, result.violations);
    } catch (const Json::exception& e) {
      result.violations.push_back({"/", "schema", e.what()});
    }
  }
  result.passed = result.violations.empty();
  return result;
}

CardValidation validate_card(const IarcDocument& doc) { return validate_card(Json(doc)); }

CardValidation validate_card_text(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    return CardValidation{false, {{"/", "parse", e.what()}}};
  }
  return validate_card(j);
}

}  // namespace iarc
