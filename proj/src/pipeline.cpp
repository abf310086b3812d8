#include "iarc/pipeline.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <filesystem>
#include <set>

#include "iarc/error.hpp"
#include "iarc/html_report.hpp"
#include "iarc/rng.hpp"

namespace fs = std::filesystem;

namespace iarc {

// ---------------------------------------------------------------------------
// Configuration

namespace {

const std::set<std::string> kConfigKeys = {
    "raw",          "preprocessed",      "columns",          "target",
    "predictions",  "catalog",           "metadata",         "out",
    "seed",         "code_version",      "created_at",       "q_odd",
    "odd_manual_ranges", "split",        "key_feature_count", "overlay_grid",
    "drift_windows", "reliability_bins", "primary_metric",   "levels",
    "reference_models", "lambda_grid",   "notes"};

std::string resolve(const std::string& base, const std::string& path) {
  if (base.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base) / path).lexically_normal().string();
}

std::optional<std::string> optional_path(const Json& j, const char* key, const std::string& base) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return resolve(base, j.at(key).get<std::string>());
}

}  // namespace

ProjectConfig ProjectConfig::from_json(const Json& j, const std::string& base_dir) {
  if (!j.is_object()) throw Error(ErrorKind::configuration, "project config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!kConfigKeys.count(key)) {
      throw Error(ErrorKind::configuration, fmt::format("unknown project config key '{}'", key));
    }
  }
  ProjectConfig c;
  try {
    c.raw = optional_path(j, "raw", base_dir);
    c.preprocessed = optional_path(j, "preprocessed", base_dir);
    c.predictions = optional_path(j, "predictions", base_dir);
    c.catalog = optional_path(j, "catalog", base_dir);
    c.metadata = optional_path(j, "metadata", base_dir);
    if (j.contains("out")) c.out = resolve(base_dir, j.at("out").get<std::string>());
    if (j.contains("columns")) {
      const Json& cols = j.at("columns");
      c.columns.timestamp = cols.value("timestamp", c.columns.timestamp);
      if (cols.contains("batch") && !cols.at("batch").is_null()) {
        c.columns.batch = cols.at("batch").get<std::string>();
      }
      c.columns.ignore = cols.value("ignore", std::vector<std::string>{});
    }
    c.target = j.value("target", std::string());
    c.seed = j.value("seed", c.seed);
    c.code_version = j.value("code_version", c.code_version);
    if (j.contains("created_at")) c.created_at = j.at("created_at").get<std::string>();
    c.q_odd = j.value("q_odd", c.q_odd);
    if (j.contains("odd_manual_ranges")) {
      for (const auto& [f, r] : j.at("odd_manual_ranges").items()) {
        c.odd_manual_ranges[f] = {r.at(0).get<double>(), r.at(1).get<double>()};
      }
    }
    if (j.contains("split")) {
      Json split = j.at("split");
      if (!split.contains("fractions")) split["fractions"] = Json(c.split).at("fractions");
      c.split_seed_explicit = split.contains("seed");
      c.split = split.get<SplitConfig>();
    }
    c.key_feature_count = j.value("key_feature_count", c.key_feature_count);
    c.overlay_grid = j.value("overlay_grid", c.overlay_grid);
    c.drift_windows = j.value("drift_windows", c.drift_windows);
    c.reliability_bins = j.value("reliability_bins", c.reliability_bins);
    c.primary_metric = j.value("primary_metric", c.primary_metric);
    c.levels = j.value("levels", c.levels);
    if (j.contains("reference_models")) {
      c.reference_models.clear();
      for (const auto& m : j.at("reference_models")) {
        ReferenceVersion v;
        m.at("model_version").get_to(v.model_version);
        if (m.contains("lambda") && !m.at("lambda").is_null()) v.lambda = m.at("lambda").get<double>();
        c.reference_models.push_back(std::move(v));
      }
    }
    c.lambda_grid = j.value("lambda_grid", c.lambda_grid);
    c.notes = j.value("notes", std::vector<std::string>{});
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::configuration, fmt::format("project config: {}", e.what()));
  }
  c.split.validate();
  if (c.reference_models.empty()) {
    throw Error(ErrorKind::configuration, "project config: reference_models must not be empty");
  }
  return c;
}

ProjectConfig ProjectConfig::load(const std::string& path) {
  return from_json(read_json_file(path), fs::path(path).parent_path().string());
}

SplitConfig effective_split(const ProjectConfig& cfg) {
  SplitConfig s = cfg.split;
  if (!cfg.split_seed_explicit) s.seed = derive_seed(cfg.seed, "split");
  return s;
}

RunStamp project_run_stamp(const ProjectConfig& cfg, const CardMetadata* metadata) {
  std::string created;
  if (cfg.created_at && *cfg.created_at == "now") {
    created = utc_now_iso8601();
  } else if (cfg.created_at) {
    created = *cfg.created_at;
  } else if (metadata) {
    created = metadata->date + "T00:00:00Z";
  } else {
    created = "1970-01-01T00:00:00Z";
  }
  const std::string code =
      metadata && cfg.code_version == "unversioned" ? metadata->code_version : cfg.code_version;
  return make_run_stamp(cfg.seed, code, created);
}

// ---------------------------------------------------------------------------
// Data preparation

TimeSeriesDataset locf_fill(const TimeSeriesDataset& ds, std::string name) {
  std::vector<double> v(ds.values().begin(), ds.values().end());
  const std::size_t n = ds.rows(), p = ds.cols();
  const auto& batches = ds.batch_ids();
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && !(batches && (*batches)[end] != (*batches)[start])) ++end;
    for (std::size_t c = 0; c < p; ++c) {
      double last = kMissing;
      for (std::size_t r = start; r < end; ++r) {
        double& cell = v[r * p + c];
        if (is_missing(cell)) {
          cell = last;
        } else {
          last = cell;
        }
      }
      // Leading gap: first observed value of the batch.
      double first = kMissing;
      for (std::size_t r = start; r < end && is_missing(first); ++r) first = v[r * p + c];
      for (std::size_t r = start; r < end && is_missing(v[r * p + c]); ++r) v[r * p + c] = first;
    }
    start = end;
  }
  Json prov = {{"derived_from", ds.dataset_version()},
               {"preprocessing", "last observation carried forward within batch"}};
  return ds.with_values(std::move(v), std::move(name), std::move(prov));
}

namespace {

std::string file_stem(const std::string& path) { return fs::path(path).stem().string(); }

}  // namespace

PreparedData prepare_data(const ProjectConfig& cfg) {
  if (!cfg.raw && !cfg.preprocessed) {
    throw Error(ErrorKind::configuration, "no dataset given (set --raw and/or --preprocessed)");
  }
  PreparedData d;
  if (cfg.raw) d.raw = load_csv(*cfg.raw, cfg.columns, file_stem(*cfg.raw));
  if (cfg.preprocessed) {
    d.preprocessed = load_csv(*cfg.preprocessed, cfg.columns, file_stem(*cfg.preprocessed));
    d.has_preprocessed = true;
  }
  if (!cfg.raw) d.raw = d.preprocessed;
  if (!cfg.preprocessed) d.preprocessed = d.raw;
  if (d.raw.feature_names() != d.preprocessed.feature_names()) {
    throw Error(ErrorKind::configuration, "raw and preprocessed files have different features");
  }
  d.quality_raw = compute_quality(d.raw, Stage::raw);
  d.quality_preprocessed = compute_quality(d.preprocessed, Stage::preprocessed);

  if (!cfg.target.empty()) d.preprocessed.feature_index(cfg.target);
  for (const auto& f : d.preprocessed.feature_names()) {
    if (f != cfg.target) d.features.push_back(f);
  }
  if (d.features.empty()) throw Error(ErrorKind::configuration, "no input features besides the target");

  const SplitConfig split = effective_split(cfg);
  d.split = make_split(d.preprocessed, split);
  d.split_validation = validate_splits(d.preprocessed, d.split, split);
  d.train = d.preprocessed.select_rows(d.split.train(), "train");
  d.validation = d.preprocessed.select_rows(d.split.validation(), "validation");
  d.calibration = d.preprocessed.select_rows(d.split.calibration(), "calibration");
  d.test = d.preprocessed.select_rows(d.split.test(), "test");
  if (d.train.empty()) throw Error(ErrorKind::infeasible_split, "training split is empty");
  return d;
}

OddModel fit_project_odd(const ProjectConfig& cfg, const PreparedData& data) {
  OddFitOptions opt;
  opt.q_odd = cfg.q_odd;
  opt.manual_ranges = cfg.odd_manual_ranges;
  opt.features = data.features;
  opt.subsample_seed = derive_seed(cfg.seed, "odd");
  return fit_odd(data.train, opt);
}

// ---------------------------------------------------------------------------
// Scenarios

Json default_catalog_json(const std::vector<std::string>& features, std::uint64_t seed) {
  Json scenarios = Json::array();
  for (const char* fault : {"gaussian_noise", "drift_ramp", "spike", "dropout"}) {
    scenarios.push_back(Json{{"name", fault},
                             {"kind", "synthetic_fault"},
                             {"fault", fault},
                             {"features", features},
                             {"severities", {0.2, 0.5, 1.0}},
                             {"seed", derive_seed(seed, std::string("scenario/") + fault)}});
  }
  return Json{{"base_split", "test"}, {"scenarios", scenarios}};
}

ScenarioCatalog project_catalog(const ProjectConfig& cfg, const PreparedData& data) {
  if (!cfg.catalog) return build_catalog(default_catalog_json(data.features, cfg.seed));
  Json j = read_json_file(*cfg.catalog);
  if (j.contains("scenarios") && j.at("scenarios").is_array()) {
    for (auto& s : j.at("scenarios")) {
      if (s.is_object() && !s.contains("seed") && s.contains("name")) {
        s["seed"] = derive_seed(cfg.seed, "scenario/" + s.at("name").get<std::string>());
      }
    }
  }
  return build_catalog(j);
}

namespace {

const TimeSeriesDataset& split_by_name(const PreparedData& d, const std::string& name) {
  if (name == "train") return d.train;
  if (name == "validation") return d.validation;
  if (name == "calibration") return d.calibration;
  if (name == "test") return d.test;
  throw Error(ErrorKind::configuration, fmt::format("unknown base split '{}'", name));
}

std::map<std::string, double> train_stds(const PreparedData& d) {
  std::map<std::string, double> out;
  for (const auto& f : d.features) {
    const auto vals = drop_missing(d.train.column(f));
    if (vals.size() >= 2) out[f] = sample_std(vals);
  }
  return out;
}

}  // namespace

std::vector<ScenarioData> build_scenarios(const ProjectConfig& cfg, const PreparedData& data,
                                          const ScenarioCatalog& catalog) {
  const TimeSeriesDataset& base = split_by_name(data, catalog.base_split);
  if (base.empty()) {
    throw Error(ErrorKind::empty_scenario,
                fmt::format("base split '{}' is empty", catalog.base_split));
  }
  const auto stds = train_stds(data);
  std::vector<ScenarioData> out;
  for (const auto& spec : catalog.scenarios) {
    for (const auto& f : spec.features) {
      if (f == cfg.target) {
        throw Error(ErrorKind::configuration,
                    fmt::format("scenario '{}' perturbs the target '{}'", spec.name, f));
      }
    }
    out.push_back({spec, materialize_scenario(base, spec, stds, catalog.anchors)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Drift

DistributionalDiagnostics run_drift(const ProjectConfig& cfg, const PreparedData& data,
                                    const std::vector<ScenarioData>& scenarios) {
  DistributionalDiagnostics diag;
  for (const auto& s : scenarios) {
    DivergenceReport r = scenario_divergence(data.train, s.data, data.features);
    r.scenario = s.spec.name;
    diag.divergence.push_back(std::move(r));
  }
  if (diag.divergence.empty()) return diag;
  diag.key_features = key_features(diag.divergence, cfg.key_feature_count);
  for (const auto& f : diag.key_features) {
    const DivergenceReport* best = nullptr;
    double best_w = -1.0;
    for (const auto& r : diag.divergence) {
      for (const auto& fd : r.features) {
        if (fd.feature == f && fd.normalized_wasserstein > best_w) {
          best_w = fd.normalized_wasserstein;
          best = &r;
        }
      }
    }
    if (!best) continue;
    const ScenarioData* sd = nullptr;
    for (const auto& s : scenarios) {
      if (s.spec.name == best->scenario) sd = &s;
    }
    const auto tr = drop_missing(data.train.column(f));
    const auto sc = drop_missing(sd->data.column(f));
    if (tr.empty() || sc.empty()) continue;
    KdeOverlay ov = kde_overlay(tr, sc, cfg.overlay_grid);
    ov.feature = f;
    ov.scenario = best->scenario;
    diag.kde_overlays.push_back(std::move(ov));
  }
  return diag;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

double validation_mae(const SoftSensor& s, const TimeSeriesDataset& val) {
  const PointPredictions p = predict_points(s, val);
  if (p.y_true.empty()) return std::numeric_limits<double>::infinity();
  double acc = 0.0;
  for (std::size_t i = 0; i < p.y_true.size(); ++i) acc += std::abs(p.y_true[i] - p.y_point[i]);
  return acc / static_cast<double>(p.y_true.size());
}

SoftSensorSpec sensor_spec(const ProjectConfig& cfg, const PreparedData& data) {
  if (cfg.target.empty()) {
    throw Error(ErrorKind::configuration, "the reference model needs a target column (--target)");
  }
  SoftSensorSpec spec;
  spec.inputs = data.features;
  spec.target = cfg.target;
  const bool has_feed =
      std::find(spec.inputs.begin(), spec.inputs.end(), "feed_rate") != spec.inputs.end();
  if (!has_feed) spec.integrate.reset();
  return spec;
}

void finish_robustness(const ProjectConfig& cfg, const CardMetadata* metadata,
                       const std::map<std::string, UqReport>& baselines,
                       const std::map<std::string, std::vector<ScenarioOutcome>>& outcomes,
                       EvaluationResult& result) {
  std::vector<VersionEntry> entries;
  for (const auto& [version, base] : baselines) {
    auto it = outcomes.find(version);
    const std::vector<ScenarioOutcome> empty;
    RobustnessSummary sum = build_summary(it == outcomes.end() ? empty : it->second, base.metrics,
                                          cfg.primary_metric, version);
    std::string date = metadata ? metadata->date_of(version) : std::string();
    entries.push_back({version, date, sum});
    result.summaries.push_back(std::move(sum));
  }
  if (!entries.empty()) {
    try {
      result.comparison = compare_versions(entries);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::comparison) throw;
      result.notes.push_back(fmt::format("Version comparison skipped: {}", e.what()));
    }
  }
}

}  // namespace

EvaluationResult evaluate_reference(const ProjectConfig& cfg, const PreparedData& data,
                                    const ScenarioCatalog& catalog,
                                    const std::vector<ScenarioData>& scenarios,
                                    const CardMetadata* metadata) {
  const SoftSensorSpec spec = sensor_spec(cfg, data);
  const TimeSeriesDataset& base = split_by_name(data, catalog.base_split);
  EvaluationResult result;

  std::string inputs;
  for (const auto& f : spec.inputs) inputs += (inputs.empty() ? "" : ", ") + f;
  result.notes.push_back(fmt::format(
      "Reference model: ridge regression on {}{}; missing inputs are imputed by last observation "
      "carried forward within a batch (training mean at a batch start).",
      inputs, spec.integrate ? " plus cumulative feed integrated over batch time" : ""));

  std::map<std::string, UqReport> baselines;
  std::map<std::string, std::vector<ScenarioOutcome>> outcomes;
  for (const auto& version : cfg.reference_models) {
    double lambda = 0.0;
    if (version.lambda) {
      lambda = *version.lambda;
    } else {
      double best = std::numeric_limits<double>::infinity();
      bool any = false;
      for (double l : cfg.lambda_grid) {
        try {
          const double mae = validation_mae(fit_soft_sensor(data.train, spec, l), data.validation);
          if (!any || mae < best) {
            best = mae;
            lambda = l;
            any = true;
          }
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::singular_system) throw;
        }
      }
      if (!any) throw Error(ErrorKind::singular_system, "no lambda in the grid gave a usable fit");
      result.notes.push_back(fmt::format("Model {}: lambda = {} selected by validation MAE.",
                                         version.model_version, format_number(lambda)));
    }
    SoftSensor sensor = fit_soft_sensor(data.train, spec, lambda);

    auto evaluate = [&](const TimeSeriesDataset& ds, const std::string& slice) {
      IntervalPrediction ip = predict_with_intervals(sensor, ds, data.calibration, cfg.levels,
                                                     version.model_version, slice);
      UqReport report = evaluate_predictions(ip.predictions, cfg.reliability_bins);
      for (auto& w : ip.warnings) report.warnings.push_back(std::move(w));
      result.predictions.push_back(std::move(ip.predictions));
      return report;
    };
    UqReport base_report = evaluate(base, catalog.base_split);
    baselines[version.model_version] = base_report;
    result.uq.push_back(std::move(base_report));
    for (const auto& s : scenarios) {
      UqReport r = evaluate(s.data, s.spec.name);
      std::optional<double> severity;
      if (s.spec.kind == ScenarioKind::synthetic_fault) severity = s.spec.severity;
      outcomes[version.model_version].push_back({s.spec.name, s.spec.family(), severity, r.metrics});
      result.uq.push_back(std::move(r));
    }
    result.models.push_back(std::move(sensor));
  }
  finish_robustness(cfg, metadata, baselines, outcomes, result);
  return result;
}

EvaluationResult evaluate_prediction_files(const ProjectConfig& cfg, const std::string& dir,
                                           const ScenarioCatalog& catalog,
                                           const CardMetadata* metadata) {
  if (!fs::is_directory(dir)) {
    throw Error(ErrorKind::io, fmt::format("predictions directory '{}' not found", dir));
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());

  EvaluationResult result;
  std::map<std::string, UqReport> baselines;
  std::map<std::string, std::vector<ScenarioOutcome>> outcomes;
  for (const auto& path : files) {
    const std::string stem = path.stem().string();
    const auto sep = stem.find("__");
    if (sep == std::string::npos || sep == 0 || sep + 2 >= stem.size()) {
      result.notes.push_back(
          fmt::format("Prediction file '{}' ignored: expected <version>__<slice>.csv", stem));
      continue;
    }
    const std::string version = stem.substr(0, sep);
    const std::string slice = stem.substr(sep + 2);
    const ScenarioSpec* spec = catalog.find(slice);
    if (slice != catalog.base_split && !spec) {
      result.notes.push_back(fmt::format(
          "Prediction file '{}' ignored: slice '{}' is neither the base split nor a catalog "
          "scenario",
          stem, slice));
      continue;
    }
    UqReport r = evaluate_predictions(read_predictions_csv(path.string(), version, slice),
                                      cfg.reliability_bins);
    if (slice == catalog.base_split) {
      baselines[version] = r;
    } else {
      std::optional<double> severity;
      if (spec->kind == ScenarioKind::synthetic_fault) severity = spec->severity;
      outcomes[version].push_back({slice, spec->family(), severity, r.metrics});
    }
    result.uq.push_back(std::move(r));
  }
  if (baselines.empty()) {
    throw Error(ErrorKind::configuration,
                fmt::format("no '<version>__{}.csv' baseline prediction file in '{}'",
                            catalog.base_split, dir));
  }
  for (const auto& [version, _] : outcomes) {
    if (!baselines.count(version)) {
      throw Error(ErrorKind::configuration,
                  fmt::format("model version '{}' has scenario predictions but no baseline file",
                              version));
    }
  }
  finish_robustness(cfg, metadata, baselines, outcomes, result);
  return result;
}

// ---------------------------------------------------------------------------
// Card

namespace {

Json dataset_provenance(const TimeSeriesDataset& ds, const std::optional<std::string>& path) {
  Json j = {{"name", ds.name()},
            {"dataset_version", ds.dataset_version()},
            {"rows", ds.rows()},
            {"features", ds.feature_names()}};
  if (path) j["file"] = fs::path(*path).filename().string();
  return j;
}

}  // namespace

CardBuild build_card(const ProjectConfig& cfg, const CardMetadata& metadata, bool collapsible) {
  const PreparedData data = prepare_data(cfg);
  if (!data.split_validation.passed) {
    throw Error(ErrorKind::validation, fmt::format("split validation failed: {}",
                                                   data.split_validation.violations.front().message));
  }
  const OddModel odd = fit_project_odd(cfg, data);
  const ScenarioCatalog catalog = project_catalog(cfg, data);
  const auto scenarios = build_scenarios(cfg, data, catalog);

  CardBuild out;
  out.evaluation = cfg.predictions
                       ? evaluate_prediction_files(cfg, *cfg.predictions, catalog, &metadata)
                       : evaluate_reference(cfg, data, catalog, scenarios, &metadata);

  CardInputs in;
  in.metadata = metadata;
  in.run_stamp = project_run_stamp(cfg, &metadata);
  in.dataset_name = data.preprocessed.name();
  in.dataset_version = data.preprocessed.dataset_version();
  in.provenance = {{"raw", dataset_provenance(data.raw, cfg.raw)},
                   {"preprocessed", dataset_provenance(data.preprocessed,
                                                       cfg.preprocessed ? cfg.preprocessed : cfg.raw)},
                   {"target", cfg.target}};
  in.quality_raw = data.quality_raw;
  in.quality_preprocessed = data.quality_preprocessed;
  in.split_config = effective_split(cfg);
  for (std::size_t k = 0; k < 4; ++k) in.split_sizes[kSplitNames[k]] = data.split.parts[k].size();
  in.split_sizes["purged"] = data.split.purged.size();
  in.odd = odd;
  auto add_coverage = [&](const std::string& name, const TimeSeriesDataset& ds) {
    if (ds.empty()) return;
    const OddCoverage c = coverage_fraction(odd, ds);
    in.odd_coverage.push_back({name, c.fraction, c.rows, c.inside});
  };
  add_coverage("train", data.train);
  add_coverage("test", data.test);
  for (const auto& s : scenarios) add_coverage(s.spec.name, s.data);
  in.catalog = catalog;
  in.diagnostics = run_drift(cfg, data, scenarios);
  in.primary_metric = cfg.primary_metric;
  in.uq = out.evaluation.uq;
  in.robustness = out.evaluation.summaries;
  in.comparison = out.evaluation.comparison;
  in.notes = cfg.notes;
  if (!data.has_preprocessed) {
    in.notes.push_back("No preprocessed file was supplied; the preprocessed quality report "
                       "repeats the raw data.");
  }
  for (const auto& n : out.evaluation.notes) in.notes.push_back(n);

  out.doc = assemble_card(in);
  const CardValidation v = validate_card(out.doc);
  if (!v.passed) {
    const auto& first = v.violations.front();
    throw Error(ErrorKind::validation,
                fmt::format("assembled card failed validation at {}: {}", first.pointer, first.message));
  }
  out.json = serialize_json(out.doc);
  out.html = render_html(out.doc, HtmlOptions{collapsible});
  return out;
}

// ---------------------------------------------------------------------------
// Demo

namespace {

Json demo_metadata() {
  return Json{
      {"general_information",
       {{"model_name", "Penicillin soft sensor (ridge regression)"},
        {"model_version", "1.0.0"},
        {"date", "2026-01-15"},
        {"provider", "iarc-kit demo"},
        {"deployment_context",
         "Online estimation of penicillin titer in fed-batch fermentation from feed rate, "
         "temperature, pH and dissolved oxygen sensors (synthetic surrogate process)."},
        {"code_version", "demo"}}},
      {"intended_use",
       {{"description",
         "Decision support for operators: a soft-sensor estimate of product titer between "
         "offline laboratory assays, with calibrated 50% and 90% prediction intervals."},
        {"out_of_scope_uses",
         {"Closed-loop control without operator confirmation.",
          "Batch release or other quality decisions.",
          "Processes, strains or scales outside the documented operational design domain."}}}},
      {"data",
       {{"overview",
         "Twenty synthetic fed-batch runs sampled every 30 minutes. The raw export contains sensor "
         "dropouts; the preprocessed file fills them by last observation carried forward."},
        {"preprocessing_notes",
         "Missing sensor cells carried forward within each batch (leading gaps take the first "
         "observed value). No filtering, resampling or outlier removal."}}},
      {"limitations",
       {"The soft sensor has not been validated against laboratory assays from a real plant."}},
      {"acceptance_thresholds",
       {{{"metric", "mae"}, {"threshold", 0.5}, {"slice_name", "test"}},
        {{"metric", "wis"}, {"threshold", 0.4}, {"slice_name", "test"}}}},
      {"model_versions",
       {{{"model_version", "0.9.0"}, {"date", "2025-06-01"}},
        {{"model_version", "1.0.0"}, {"date", "2026-01-15"}}}}};
}

}  // namespace

CardBuild run_demo(const DemoOptions& options) {
  const fs::path out(options.out);
  const fs::path inputs = out / "inputs";
  fs::create_directories(inputs);

  SyntheticProcessConfig sc;
  sc.batch_count = options.batch_count;
  sc.steps_per_batch = options.steps_per_batch;
  sc.seed = derive_seed(options.seed, "surrogate");
  const TimeSeriesDataset clean = generate_surrogate(sc);

  // Raw export: ~1% sensor dropouts, target untouched.
  std::vector<double> v(clean.values().begin(), clean.values().end());
  Rng rng(derive_seed(options.seed, "demo/raw-dropouts"));
  const std::size_t target = clean.feature_index(kSurrogateTarget);
  for (std::size_t r = 0; r < clean.rows(); ++r) {
    for (std::size_t c = 0; c < clean.cols(); ++c) {
      const bool drop = rng.bernoulli(0.01);
      if (drop && c != target) v[r * clean.cols() + c] = kMissing;
    }
  }
  const TimeSeriesDataset raw = clean.with_values(std::move(v), "raw", clean.provenance());
  const TimeSeriesDataset pre = locf_fill(raw, "preprocessed");

  CsvColumns cols;
  cols.batch = "batch_id";
  write_csv(raw, (inputs / "raw.csv").string(), cols);
  write_csv(pre, (inputs / "preprocessed.csv").string(), cols);
  write_text_file((inputs / "metadata.json").string(), canonical_dump(demo_metadata()));

  Json config = {
      {"raw", "raw.csv"},
      {"preprocessed", "preprocessed.csv"},
      {"columns", {{"timestamp", "timestamp"}, {"batch", "batch_id"}}},
      {"target", kSurrogateTarget},
      {"catalog", "catalog.json"},
      {"metadata", "metadata.json"},
      {"seed", options.seed},
      {"split",
       {{"mode", "group"},
        {"fractions", {{"train", 0.6}, {"validation", 0.1}, {"calibration", 0.15}, {"test", 0.15}}},
        {"purge_gap", 0}}},
      {"reference_models",
       {{{"model_version", "0.9.0"}, {"lambda", 1000.0}}, {{"model_version", "1.0.0"}}}},
      {"notes",
       {"Data come from a synthetic fed-batch surrogate whose constants are tool defaults; they "
        "stand in for plant or simulator data and carry no process-fidelity claim."}}};
  if (options.created_at) config["created_at"] = *options.created_at;

  // The catalog adds one real slice: the first test batch.
  ProjectConfig probe = ProjectConfig::from_json(config, inputs.string());
  probe.catalog.reset();
  const PreparedData data = prepare_data(probe);
  Json catalog = default_catalog_json(data.features, options.seed);
  const auto test_batches = data.test.batches();
  if (!test_batches.empty()) {
    catalog["scenarios"].push_back(Json{{"name", "batch_" + test_batches.front()},
                                        {"kind", "real_slice"},
                                        {"batch_id", test_batches.front()}});
  }
  write_text_file((inputs / "catalog.json").string(), canonical_dump(catalog));
  write_text_file((inputs / "config.json").string(), canonical_dump(config));

  ProjectConfig cfg = ProjectConfig::load((inputs / "config.json").string());
  cfg.out = out.string();
  const CardMetadata metadata = load_metadata(*cfg.metadata);
  CardBuild build = build_card(cfg, metadata, options.collapsible);
  write_text_file((out / "card.json").string(), build.json);
  write_text_file((out / "card.html").string(), build.html);
  return build;
}

}  // namespace iarc
