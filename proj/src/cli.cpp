#include "iarc/cli.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <optional>

#include "iarc/card.hpp"
#include "iarc/error.hpp"
#include "iarc/pipeline.hpp"

namespace fs = std::filesystem;

namespace iarc {

namespace {

constexpr int kOk = 0;
constexpr int kValidationFailure = 1;
constexpr int kUsage = 2;

// Flag values; unset optionals leave the config file (or defaults) alone.
struct Overrides {
  std::string config;
  std::optional<std::string> raw, preprocessed, timestamp_col, batch_col, target, out, catalog,
      metadata, predictions, created_at, code_version, primary_metric, split_mode;
  std::optional<std::uint64_t> seed;
  std::optional<double> q_odd;
  std::vector<double> fractions;
  std::optional<std::size_t> purge_gap, key_features;
};

void add_project_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "Project config JSON (flags override it)");
  cmd->add_option("--raw", o.raw, "Raw dataset CSV");
  cmd->add_option("--preprocessed", o.preprocessed, "Preprocessed dataset CSV");
  cmd->add_option("--timestamp-col", o.timestamp_col, "Timestamp column name");
  cmd->add_option("--batch-col", o.batch_col, "Batch id column name");
  cmd->add_option("--target", o.target, "Target column (excluded from ODD, drift, faults)");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--catalog", o.catalog, "Scenario catalog JSON");
  cmd->add_option("--metadata", o.metadata, "Card metadata JSON");
  cmd->add_option("--predictions", o.predictions,
                  "Directory of <version>__<slice>.csv prediction files");
  cmd->add_option("--q-odd", o.q_odd, "ODD density quantile");
  cmd->add_option("--split-mode", o.split_mode, "chronological or group")
      ->check(CLI::IsMember({"chronological", "group"}));
  cmd->add_option("--fractions", o.fractions, "train validation calibration test fractions")
      ->expected(4);
  cmd->add_option("--purge-gap", o.purge_gap, "Rows purged between chronological splits");
  cmd->add_option("--key-features", o.key_features, "Number of KDE overlay features");
  cmd->add_option("--primary-metric", o.primary_metric, "Metric used for retention");
  cmd->add_option("--created-at", o.created_at, "Run timestamp (ISO-8601 or 'now')");
  cmd->add_option("--code-version", o.code_version, "Code identifier recorded in the run stamp");
}

ProjectConfig resolve_config(const Overrides& o) {
  ProjectConfig c = o.config.empty() ? ProjectConfig{} : ProjectConfig::load(o.config);
  if (o.raw) c.raw = *o.raw;
  if (o.preprocessed) c.preprocessed = *o.preprocessed;
  if (o.timestamp_col) c.columns.timestamp = *o.timestamp_col;
  if (o.batch_col) c.columns.batch = *o.batch_col;
  if (o.target) c.target = *o.target;
  if (o.out) c.out = *o.out;
  if (o.seed) c.seed = *o.seed;
  if (o.catalog) c.catalog = *o.catalog;
  if (o.metadata) c.metadata = *o.metadata;
  if (o.predictions) c.predictions = *o.predictions;
  if (o.q_odd) c.q_odd = *o.q_odd;
  if (o.split_mode) c.split.mode = *o.split_mode == "group" ? SplitMode::group : SplitMode::chronological;
  if (!o.fractions.empty()) {
    for (std::size_t k = 0; k < 4; ++k) c.split.fractions[k] = o.fractions[k];
  }
  if (o.purge_gap) c.split.purge_gap = *o.purge_gap;
  if (o.key_features) c.key_feature_count = *o.key_features;
  if (o.primary_metric) c.primary_metric = *o.primary_metric;
  if (o.created_at) c.created_at = *o.created_at;
  if (o.code_version) c.code_version = *o.code_version;
  c.split.validate();
  return c;
}

void write_json(const fs::path& path, const Json& j) {
  fs::create_directories(path.parent_path());
  write_text_file(path.string(), canonical_dump(j));
}

std::string safe_file_name(const std::string& name) {
  std::string out;
  for (char c : name) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' ||
                    c == '-' || c == '@';
    out += ok ? c : '_';
  }
  return out;
}

Json split_validation_json(const SplitValidation& v) {
  return Json{{"passed", v.passed}, {"violations", v.violations}};
}

int cmd_ingest(const ProjectConfig& cfg, std::ostream& out) {
  if (!cfg.raw && !cfg.preprocessed) {
    throw Error(ErrorKind::configuration, "ingest needs --raw and/or --preprocessed");
  }
  const fs::path dir(cfg.out);
  auto one = [&](const std::string& path, Stage stage, const char* file) {
    const TimeSeriesDataset ds = load_csv(path, cfg.columns, fs::path(path).stem().string());
    write_json(dir / file, Json(compute_quality(ds, stage)));
    out << fmt::format("{}: {} rows, {} features, version {}\n", path, ds.rows(), ds.cols(),
                       ds.dataset_version());
    return ds;
  };
  std::optional<TimeSeriesDataset> last;
  if (cfg.raw) last = one(*cfg.raw, Stage::raw, "quality_raw.json");
  if (cfg.preprocessed) last = one(*cfg.preprocessed, Stage::preprocessed, "quality_preprocessed.json");
  write_json(dir / "drift_scan.json", Json(windowed_drift_scan(*last, cfg.drift_windows)));
  return kOk;
}

int cmd_split(const ProjectConfig& cfg, std::ostream& out) {
  const PreparedData data = prepare_data(cfg);
  write_json(fs::path(cfg.out) / "splits.json",
             Json{{"config", effective_split(cfg)},
                  {"dataset_version", data.preprocessed.dataset_version()},
                  {"assignment", data.split},
                  {"validation", split_validation_json(data.split_validation)}});
  for (std::size_t k = 0; k < 4; ++k) {
    out << fmt::format("{}: {} rows\n", kSplitNames[k], data.split.parts[k].size());
  }
  if (!data.split_validation.passed) {
    for (const auto& v : data.split_validation.violations) out << "violation: " << v.message << "\n";
    return kValidationFailure;
  }
  return kOk;
}

int cmd_odd_fit(const ProjectConfig& cfg, std::ostream& out) {
  const PreparedData data = prepare_data(cfg);
  const OddModel odd = fit_project_odd(cfg, data);
  Json coverage = Json::object();
  for (const auto* ds : {&data.train, &data.validation, &data.calibration, &data.test}) {
    if (ds->empty()) continue;
    const OddCoverage c = coverage_fraction(odd, *ds);
    coverage[ds->name()] = {{"fraction", c.fraction}, {"rows", c.rows}, {"inside", c.inside},
                            {"warnings", c.warnings}};
    out << fmt::format("{}: {:.4f} inside ODD\n", ds->name(), c.fraction);
  }
  write_json(fs::path(cfg.out) / "odd_model.json", Json(odd));
  write_json(fs::path(cfg.out) / "odd_coverage.json", coverage);
  return kOk;
}

int cmd_scenarios_build(const ProjectConfig& cfg, std::ostream& out) {
  const PreparedData data = prepare_data(cfg);
  const ScenarioCatalog catalog = project_catalog(cfg, data);
  const auto scenarios = build_scenarios(cfg, data, catalog);
  const fs::path dir = fs::path(cfg.out) / "scenarios";
  fs::create_directories(dir);
  Json index = Json::array();
  for (const auto& s : scenarios) {
    const std::string file = safe_file_name(s.spec.name) + ".csv";
    write_csv(s.data, (dir / file).string(), cfg.columns);
    index.push_back({{"scenario", s.spec.name}, {"file", file},
                     {"dataset_version", s.data.dataset_version()}, {"rows", s.data.rows()}});
    out << fmt::format("{}: {} rows\n", s.spec.name, s.data.rows());
  }
  write_json(dir / "catalog.json", Json(catalog));
  write_json(dir / "index.json", index);
  return kOk;
}

int cmd_drift(const ProjectConfig& cfg, std::ostream& out) {
  const PreparedData data = prepare_data(cfg);
  const ScenarioCatalog catalog = project_catalog(cfg, data);
  const auto diag = run_drift(cfg, data, build_scenarios(cfg, data, catalog));
  write_json(fs::path(cfg.out) / "drift.json",
             Json{{"key_features", diag.key_features},
                  {"divergence", diag.divergence},
                  {"kde_overlays", diag.kde_overlays}});
  for (const auto& r : diag.divergence) out << fmt::format("{}: score {:.4g}\n", r.scenario, r.score);
  return kOk;
}

int cmd_evaluate(const ProjectConfig& cfg, std::ostream& out) {
  const PreparedData data = prepare_data(cfg);
  const ScenarioCatalog catalog = project_catalog(cfg, data);
  std::optional<CardMetadata> md;
  if (cfg.metadata) md = load_metadata(*cfg.metadata);
  const CardMetadata* mdp = md ? &*md : nullptr;
  const fs::path dir(cfg.out);
  EvaluationResult ev;
  if (cfg.predictions) {
    ev = evaluate_prediction_files(cfg, *cfg.predictions, catalog, mdp);
  } else {
    ev = evaluate_reference(cfg, data, catalog, build_scenarios(cfg, data, catalog), mdp);
    for (const auto& m : ev.models) {
      // Versions are parallel to cfg.reference_models.
      const auto& version = cfg.reference_models[static_cast<std::size_t>(&m - ev.models.data())];
      write_json(dir / "models" / (safe_file_name(version.model_version) + ".json"), Json(m));
    }
    fs::create_directories(dir / "predictions");
    for (const auto& p : ev.predictions) {
      write_predictions_csv(
          p, (dir / "predictions" /
              (safe_file_name(p.model_version) + "__" + safe_file_name(p.slice_name) + ".csv"))
                 .string());
    }
  }
  write_json(dir / "evaluation.json",
             Json{{"uq", ev.uq},
                  {"robustness", {{"summaries", ev.summaries}, {"comparison", ev.comparison}}},
                  {"notes", ev.notes}});
  for (const auto& s : ev.summaries) {
    out << fmt::format("{}: baseline {} = {:.4g}, aggregated robustness {:.4f}\n", s.model_version,
                       s.primary_metric, s.baseline_value, s.aggregated_robustness);
  }
  return kOk;
}

int cmd_card_build(const ProjectConfig& cfg, bool collapsible, std::ostream& out) {
  if (!cfg.metadata) {
    throw Error(ErrorKind::configuration,
                "card build needs a metadata file: pass --metadata <file> or set 'metadata' in "
                "the config");
  }
  if (!fs::exists(*cfg.metadata)) {
    throw Error(ErrorKind::io, fmt::format("metadata file '{}' not found", *cfg.metadata));
  }
  const CardBuild b = build_card(cfg, load_metadata(*cfg.metadata), collapsible);
  fs::create_directories(cfg.out);
  write_text_file((fs::path(cfg.out) / "card.json").string(), b.json);
  write_text_file((fs::path(cfg.out) / "card.html").string(), b.html);
  out << fmt::format("card written to {}\n", (fs::path(cfg.out) / "card.json").string());
  return kOk;
}

int cmd_validate(const std::string& path, std::ostream& out) {
  const CardValidation v = validate_card_text(read_text_file(path));
  if (v.passed) {
    out << "PASS " << path << "\n";
    return kOk;
  }
  out << "FAIL " << path << "\n";
  for (const auto& x : v.violations) {
    out << fmt::format("  [{}] {}: {}\n", x.kind, x.pointer, x.message);
  }
  return kValidationFailure;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::configuration:
    case ErrorKind::io:
      return kUsage;
    default:
      return kValidationFailure;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"iarc-kit: Industrial AI Robustness Card toolkit", "iarc-kit"};
  app.set_version_flag("--version", std::string(IARC_TOOL_VERSION));
  app.require_subcommand(1);

  Overrides o;
  bool collapsible = false;
  std::string card_path;
  DemoOptions demo;
  std::string demo_created_at;

  auto* ingest = app.add_subcommand("ingest", "Quality reports for raw and preprocessed data");
  auto* split = app.add_subcommand("split", "Leakage-safe train/validation/calibration/test split");
  auto* odd = app.add_subcommand("odd", "Operational design domain");
  auto* odd_fit = odd->add_subcommand("fit", "Fit the ODD on the training split");
  odd->require_subcommand(1);
  auto* scen = app.add_subcommand("scenarios", "Stress scenarios");
  auto* scen_build = scen->add_subcommand("build", "Write perturbed scenario datasets");
  scen->require_subcommand(1);
  auto* drift = app.add_subcommand("drift", "Distributional diagnostics per scenario");
  auto* evaluate = app.add_subcommand(
      "evaluate", "Evaluate prediction files (--predictions) or the reference model");
  auto* card = app.add_subcommand("card", "Robustness card");
  auto* card_build = card->add_subcommand("build", "Assemble card.json and card.html");
  card->require_subcommand(1);
  for (auto* cmd : {ingest, split, odd_fit, scen_build, drift, evaluate, card_build}) {
    add_project_options(cmd, o);
  }
  card_build->add_flag("--collapsible", collapsible, "Add expand/collapse-all buttons");

  auto* demo_cmd = app.add_subcommand("demo", "Full pipeline on the synthetic surrogate");
  demo_cmd->add_option("--seed", demo.seed, "Master seed");
  demo_cmd->add_option("--out", demo.out, "Output directory");
  demo_cmd->add_option("--batches", demo.batch_count, "Surrogate batch count");
  demo_cmd->add_option("--steps", demo.steps_per_batch, "Steps per batch");
  demo_cmd->add_option("--created-at", demo_created_at, "Run timestamp (ISO-8601 or 'now')");
  demo_cmd->add_flag("--collapsible", collapsible, "Add expand/collapse-all buttons");

  auto* validate = app.add_subcommand("validate", "Validate a card JSON file");
  validate->add_option("card", card_path, "Card JSON path")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << IARC_TOOL_VERSION << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    CLI::App* sub = &app;
    for (auto* s : app.get_subcommands()) sub = s;
    err << sub->help();
    return kUsage;
  }

  try {
    if (*validate) return cmd_validate(card_path, out);
    if (*demo_cmd) {
      demo.collapsible = collapsible;
      if (!demo_created_at.empty()) demo.created_at = demo_created_at;
      const CardBuild b = run_demo(demo);
      out << fmt::format("demo card written to {} ({} model versions)\n",
                         (fs::path(demo.out) / "card.json").string(),
                         b.evaluation.summaries.size());
      return kOk;
    }
    const ProjectConfig cfg = resolve_config(o);
    if (*ingest) return cmd_ingest(cfg, out);
    if (*split) return cmd_split(cfg, out);
    if (*odd_fit) return cmd_odd_fit(cfg, out);
    if (*scen_build) return cmd_scenarios_build(cfg, out);
    if (*drift) return cmd_drift(cfg, out);
    if (*evaluate) return cmd_evaluate(cfg, out);
    if (*card_build) return cmd_card_build(cfg, collapsible, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kValidationFailure;
  }
  return kUsage;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace iarc
