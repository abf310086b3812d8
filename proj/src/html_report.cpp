#include "iarc/html_report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

namespace iarc {

std::string format_sig4(double v) {
  if (!std::isfinite(v)) return "n/a";
  return fmt::format("{:.4g}", v);
}

std::string html_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

const char* color(std::size_t i) { return kPalette[i % std::size(kPalette)]; }

std::string num(std::optional<double> v) { return v ? format_sig4(*v) : "n/a"; }

// SVG coordinates use fixed two decimals so output is stable.
std::string coord(double v) { return fmt::format("{:.2f}", v); }

struct Scale {
  double d0, d1, r0, r1;
  double operator()(double v) const {
    if (d1 == d0) return (r0 + r1) / 2.0;
    return r0 + (v - d0) / (d1 - d0) * (r1 - r0);
  }
};

class Page {
 public:
  void raw(std::string_view s) { out_ += s; }
  template <typename... Args>
  void f(fmt::format_string<Args...> fs, Args&&... args) {
    out_ += fmt::format(fs, std::forward<Args>(args)...);
  }
  void text(std::string_view s) { out_ += html_escape(s); }
  std::string take() { return std::move(out_); }

  void open_section(const char* id, const char* title, const std::string& regulation) {
    f("<details open id=\"{}\" class=\"card-section\">\n<summary><h2>{}</h2>"
      "<span class=\"regulation\">EU AI Act: {}</span></summary>\n",
      id, title, html_escape(regulation));
  }
  void close_section() { raw("</details>\n"); }

  void table_head(std::initializer_list<std::string_view> cols, std::string_view caption = {}) {
    raw("<table>\n");
    if (!caption.empty()) f("<caption>{}</caption>\n", html_escape(caption));
    raw("<thead><tr>");
    for (auto c : cols) f("<th scope=\"col\">{}</th>", html_escape(c));
    raw("</tr></thead>\n<tbody>\n");
  }
  void row(std::initializer_list<std::string> cells) {
    raw("<tr>");
    for (const auto& c : cells) f("<td>{}</td>", html_escape(c));
    raw("</tr>\n");
  }
  void table_end() { raw("</tbody></table>\n"); }

 private:
  std::string out_;
};

constexpr const char* kStyle = R"(body{font-family:system-ui,sans-serif;max-width:1100px;margin:1.5em auto;padding:0 1em;color:#222}
h1{margin-bottom:.2em}
details.card-section{border:1px solid #ccc;border-radius:6px;margin:1em 0;padding:.5em 1em}
summary{cursor:pointer}
summary h2{display:inline;font-size:1.3em;margin-right:.8em}
.regulation{color:#666;font-size:.9em}
table{border-collapse:collapse;margin:.6em 0;font-size:.9em}
caption{text-align:left;font-weight:bold;padding:.3em 0}
th,td{border:1px solid #ddd;padding:.2em .5em;text-align:left}
td.pass{color:#1a7f37}td.fail{color:#c62828}
figure{display:inline-block;margin:.5em 1em .5em 0}
figcaption{font-size:.85em;color:#444}
svg text{font-size:10px;font-family:sans-serif}
pre{background:#f6f6f6;padding:.5em;overflow-x:auto;font-size:.85em}
)";

constexpr const char* kToggleScript = R"(<script>
function iarcToggle(open){document.querySelectorAll('details.card-section').forEach(function(d){d.open=open;});}
</script>
)";

// ---------------------------------------------------------------------------
// Plots

std::optional<std::pair<double, double>> odd_range(const IarcDocument& doc,
                                                   const std::string& feature) {
  const Json& feats = doc.data.odd.model.value("features", Json::array());
  for (const auto& f : feats) {
    if (f.value("feature", "") == feature) {
      const auto& r = f.at("range");
      return std::make_pair(r[0].get<double>(), r[1].get<double>());
    }
  }
  return std::nullopt;
}

std::string polyline(const std::vector<double>& xs, const std::vector<double>& ys, const Scale& sx,
                     const Scale& sy) {
  std::string pts;
  for (std::size_t i = 0; i < xs.size() && i < ys.size(); ++i) {
    if (!std::isfinite(ys[i])) continue;
    if (!pts.empty()) pts += ' ';
    pts += coord(sx(xs[i])) + "," + coord(sy(ys[i]));
  }
  return pts;
}

void kde_overlay_svg(Page& pg, const IarcDocument& doc, const KdeOverlay& ov) {
  constexpr double w = 360, h = 200, ml = 40, mr = 10, mt = 10, mb = 30;
  if (ov.grid.empty()) return;
  double ymax = 0.0;
  for (double v : ov.train_density) ymax = std::max(ymax, v);
  for (double v : ov.scenario_density) ymax = std::max(ymax, v);
  if (ymax <= 0.0) ymax = 1.0;
  const Scale sx{ov.grid.front(), ov.grid.back(), ml, w - mr};
  const Scale sy{0.0, ymax * 1.05, h - mb, mt};
  pg.f("<figure><svg class=\"kde-overlay\" data-feature=\"{}\" width=\"{}\" height=\"{}\" "
       "viewBox=\"0 0 {} {}\" role=\"img\" aria-label=\"KDE overlay for {}\">\n",
       html_escape(ov.feature), w, h, w, h, html_escape(ov.feature));
  if (auto r = odd_range(doc, ov.feature)) {
    const double x0 = std::clamp(sx(r->first), ml, w - mr);
    const double x1 = std::clamp(sx(r->second), ml, w - mr);
    pg.f("<rect class=\"odd-range\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" "
         "fill=\"#2ca02c\" fill-opacity=\"0.12\"/>\n",
         coord(x0), coord(mt), coord(std::max(0.0, x1 - x0)), coord(h - mb - mt));
  }
  pg.f("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"#888\"/>\n", coord(ml),
       coord(h - mb), coord(w - mr));
  pg.f("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", color(0),
       polyline(ov.grid, ov.train_density, sx, sy));
  pg.f("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" stroke-dasharray=\"4 2\" "
       "points=\"{}\"/>\n",
       color(1), polyline(ov.grid, ov.scenario_density, sx, sy));
  pg.f("<text x=\"{}\" y=\"{}\">{}</text>\n", coord(ml), coord(h - 12),
       format_sig4(ov.grid.front()));
  pg.f("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", coord(w - mr), coord(h - 12),
       format_sig4(ov.grid.back()));
  pg.f("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", coord((ml + w - mr) / 2),
       coord(h - 2), html_escape(ov.feature));
  pg.raw("</svg>\n");
  pg.f("<figcaption>{}: training density (solid) vs scenario {} (dashed); shaded band is the "
       "ODD range.</figcaption></figure>\n",
       html_escape(ov.feature), html_escape(ov.scenario));
}

struct RadarSeries {
  std::string label;
  std::vector<double> values;  // per axis, in [0, 1]
};

void radar_svg(Page& pg, const std::vector<std::string>& axes,
               const std::vector<RadarSeries>& series) {
  constexpr double size = 420, cx = 210, cy = 210, radius = 150;
  pg.f("<figure><svg class=\"radar\" width=\"{0}\" height=\"{0}\" viewBox=\"0 0 {0} {0}\" "
       "role=\"img\" aria-label=\"Retention per scenario and model version\">\n",
       size);
  const std::size_t n = axes.size();
  auto point = [&](std::size_t i, double r) {
    const double angle = -std::numbers::pi / 2 + 2 * std::numbers::pi * static_cast<double>(i) /
                                                      static_cast<double>(std::max<std::size_t>(n, 1));
    return std::make_pair(cx + r * radius * std::cos(angle), cy + r * radius * std::sin(angle));
  };
  for (double ring : {0.25, 0.5, 0.75, 1.0}) {
    std::string pts;
    for (std::size_t i = 0; i < n; ++i) {
      auto [x, y] = point(i, ring);
      if (!pts.empty()) pts += ' ';
      pts += coord(x) + "," + coord(y);
    }
    pg.f("<polygon class=\"radar-grid\" fill=\"none\" stroke=\"#ddd\" points=\"{}\"/>\n", pts);
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto [x, y] = point(i, 1.0);
    auto [lx, ly] = point(i, 1.12);
    pg.f("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#ddd\"/>\n", coord(cx), coord(cy),
         coord(x), coord(y));
    pg.f("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", coord(lx), coord(ly),
         html_escape(axes[i]));
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    std::string pts;
    for (std::size_t i = 0; i < n; ++i) {
      auto [x, y] = point(i, std::clamp(series[s].values[i], 0.0, 1.0));
      if (!pts.empty()) pts += ' ';
      pts += coord(x) + "," + coord(y);
    }
    pg.f("<polygon class=\"radar-series\" data-version=\"{}\" fill=\"{}\" fill-opacity=\"0.15\" "
         "stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
         html_escape(series[s].label), color(s), color(s), pts);
    pg.f("<text x=\"10\" y=\"{}\" fill=\"{}\">{}</text>\n", coord(14 + 12 * s), color(s),
         html_escape(series[s].label));
  }
  pg.raw("</svg>\n<figcaption>Retention per scenario (1 = baseline performance kept).</figcaption>"
         "</figure>\n");
}

void severity_svg(Page& pg, const RobustnessSummary& sum) {
  if (sum.curves.empty()) return;
  constexpr double w = 420, h = 240, ml = 40, mr = 130, mt = 10, mb = 30;
  const Scale sx{0.0, 1.0, ml, w - mr};
  const Scale sy{0.0, 1.0, h - mb, mt};
  pg.f("<figure><svg class=\"severity-curves\" data-version=\"{}\" width=\"{}\" height=\"{}\" "
       "viewBox=\"0 0 {} {}\" role=\"img\" aria-label=\"Severity-performance curves\">\n",
       html_escape(sum.model_version), w, h, w, h);
  pg.f("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"#888\"/>\n", coord(ml),
       coord(h - mb), coord(w - mr));
  pg.f("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#888\"/>\n", coord(ml),
       coord(mt), coord(h - mb));
  pg.f("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">severity</text>\n", coord((ml + w - mr) / 2),
       coord(h - 4));
  pg.f("<text x=\"4\" y=\"{}\">1</text><text x=\"4\" y=\"{}\">0</text>\n", coord(mt + 8),
       coord(h - mb));
  for (std::size_t c = 0; c < sum.curves.size(); ++c) {
    const auto& curve = sum.curves[c];
    std::vector<double> xs{0.0}, ys{1.0};
    for (const auto& p : curve.points) {
      xs.push_back(p.severity);
      ys.push_back(p.retention ? *p.retention : std::nan(""));
    }
    pg.f("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", color(c),
         polyline(xs, ys, sx, sy));
    pg.f("<text x=\"{}\" y=\"{}\" fill=\"{}\">{}</text>\n", coord(w - mr + 6),
         coord(mt + 12 + 12 * c), color(c), html_escape(curve.family));
  }
  pg.raw("</svg>\n");
  pg.f("<figcaption>Retention of {} versus severity, model {}.</figcaption></figure>\n",
       html_escape(sum.primary_metric), html_escape(sum.model_version));
}

void coverage_svg(Page& pg, const UqReport& r) {
  if (r.intervals.empty()) return;
  constexpr double w = 320, h = 200, ml = 40, mr = 10, mt = 10, mb = 30;
  const Scale sy{0.0, 1.0, h - mb, mt};
  const double slot = (w - ml - mr) / static_cast<double>(r.intervals.size());
  pg.f("<figure><svg class=\"coverage-bars\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" "
       "role=\"img\" aria-label=\"Coverage versus nominal level\">\n",
       w, h, w, h);
  pg.f("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"#888\"/>\n", coord(ml),
       coord(h - mb), coord(w - mr));
  for (std::size_t i = 0; i < r.intervals.size(); ++i) {
    const auto& im = r.intervals[i];
    const double x = ml + slot * static_cast<double>(i);
    const double bw = slot * 0.35;
    pg.f("<rect class=\"nominal\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#bbb\"/>\n",
         coord(x + slot * 0.1), coord(sy(im.nominal)), coord(bw), coord(sy(0) - sy(im.nominal)));
    pg.f("<rect class=\"empirical\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n",
         coord(x + slot * 0.1 + bw), coord(sy(im.coverage)), coord(bw),
         coord(sy(0) - sy(im.coverage)), color(0));
    pg.f("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
         coord(x + slot * 0.1 + bw), coord(h - 14), format_sig4(im.nominal));
  }
  pg.raw("</svg>\n");
  pg.f("<figcaption>Nominal (grey) vs empirical coverage, {} on {}.</figcaption></figure>\n",
       html_escape(r.model_version), html_escape(r.slice_name));
}

void reliability_svg(Page& pg, const UqReport& r) {
  if (!r.classification) return;
  constexpr double s = 220, m = 30;
  const Scale sx{0.0, 1.0, m, s - 10};
  const Scale sy{0.0, 1.0, s - m, 10};
  pg.f("<figure><svg class=\"reliability\" width=\"{0}\" height=\"{0}\" viewBox=\"0 0 {0} {0}\" "
       "role=\"img\" aria-label=\"Reliability diagram\">\n",
       s);
  pg.f("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#bbb\" stroke-dasharray=\"3 3\"/>\n",
       coord(sx(0)), coord(sy(0)), coord(sx(1)), coord(sy(1)));
  for (const auto& b : r.classification->bins) {
    if (!b.accuracy) continue;
    pg.f("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" fill-opacity=\"0.6\"/>\n",
         coord(sx(b.lower)), coord(sy(*b.accuracy)), coord(sx(b.upper) - sx(b.lower)),
         coord(sy(0) - sy(*b.accuracy)), color(0));
  }
  pg.raw("</svg>\n");
  pg.f("<figcaption>Reliability diagram, {} on {}.</figcaption></figure>\n",
       html_escape(r.model_version), html_escape(r.slice_name));
}

std::string orientation_name(Orientation o) { return Json(o).get<std::string>(); }

// ---------------------------------------------------------------------------
// Sections

void general_section(Page& pg, const IarcDocument& doc) {
  const auto& gi = doc.general_information;
  pg.open_section("general-information", "General Information", gi.regulation);
  pg.table_head({"Field", "Value"});
  pg.row({"Model name", gi.model_name});
  pg.row({"Model version", gi.model_version});
  pg.row({"Dataset name", gi.dataset_name});
  pg.row({"Dataset version", gi.dataset_version});
  pg.row({"Date", gi.date});
  pg.row({"Provider", gi.provider});
  pg.row({"Deployment context", gi.deployment_context});
  pg.row({"Seed", std::to_string(gi.run_stamp.seed)});
  pg.row({"Code version", gi.run_stamp.code_version});
  pg.row({"Tool version", gi.run_stamp.tool_version});
  pg.row({"Created at", gi.run_stamp.created_at});
  for (const auto& [k, v] : gi.run_stamp.environment.items()) {
    pg.row({"Environment: " + k, v.is_string() ? v.get<std::string>() : v.dump()});
  }
  pg.table_end();
  pg.close_section();
}

void intended_use_section(Page& pg, const IarcDocument& doc) {
  pg.open_section("intended-use", "Intended Use", doc.intended_use.regulation);
  pg.raw("<p>");
  pg.text(doc.intended_use.description);
  pg.raw("</p>\n");
  if (!doc.intended_use.out_of_scope_uses.empty()) {
    pg.raw("<h3>Out-of-scope uses</h3>\n<ul>\n");
    for (const auto& u : doc.intended_use.out_of_scope_uses) {
      pg.raw("<li>");
      pg.text(u);
      pg.raw("</li>\n");
    }
    pg.raw("</ul>\n");
  }
  pg.close_section();
}

void quality_table(Page& pg, const QualityReport& q, const char* title) {
  pg.table_head({"Feature", "Missingness", "Mean", "Std", "Min", "P25", "P50", "P75", "Max"},
                fmt::format("{} ({} rows, {} duplicate timestamps)", title, q.row_count,
                            q.duplicate_timestamps));
  for (const auto& f : q.features) {
    if (f.stats) {
      const auto& s = *f.stats;
      pg.row({f.feature, format_sig4(f.missingness_rate), format_sig4(s.mean), format_sig4(s.std),
              format_sig4(s.min), format_sig4(s.p25), format_sig4(s.p50), format_sig4(s.p75),
              format_sig4(s.max)});
    } else {
      pg.row({f.feature, format_sig4(f.missingness_rate), "undefined", "undefined", "undefined",
              "undefined", "undefined", "undefined", "undefined"});
    }
  }
  pg.table_end();
}

void data_section(Page& pg, const IarcDocument& doc) {
  const auto& d = doc.data;
  pg.open_section("data", "Data", d.regulation);
  pg.raw("<p>");
  pg.text(d.overview);
  pg.raw("</p>\n");
  if (!d.preprocessing_notes.empty()) {
    pg.raw("<h3>Preprocessing</h3>\n<p>");
    pg.text(d.preprocessing_notes);
    pg.raw("</p>\n");
  }
  pg.raw("<h3>Provenance</h3>\n<pre>");
  pg.text(d.provenance.dump(2));
  pg.raw("</pre>\n");

  pg.raw("<h3>Data quality</h3>\n");
  quality_table(pg, d.quality_raw, "Raw data");
  quality_table(pg, d.quality_preprocessed, "Preprocessed data");

  pg.raw("<h3>Splits</h3>\n");
  pg.table_head({"Split", "Rows"});
  for (const auto& [name, size] : d.split_sizes) pg.row({name, std::to_string(size)});
  pg.table_end();

  pg.raw("<h3>Operational design domain</h3>\n");
  const Json& odd = d.odd.model;
  pg.table_head({"Feature", "Min", "Max", "Bandwidth", "Log-density threshold", "Training rows"},
                fmt::format("ODD per feature (q_odd = {})",
                            format_sig4(odd.value("q_odd", 0.0))));
  for (const auto& f : odd.value("features", Json::array())) {
    pg.row({f.at("feature").get<std::string>(), format_sig4(f.at("range")[0].get<double>()),
            format_sig4(f.at("range")[1].get<double>()), format_sig4(f.at("bandwidth").get<double>()),
            format_sig4(f.at("log_density_threshold").get<double>()),
            std::to_string(f.at("training_count").get<std::size_t>())});
  }
  pg.table_end();
  pg.table_head({"Slice", "Rows", "Inside", "Fraction inside ODD"}, "ODD coverage");
  for (const auto& c : d.odd.coverage) {
    pg.row({c.slice_name, std::to_string(c.rows), std::to_string(c.inside), format_sig4(c.fraction)});
  }
  pg.table_end();

  pg.raw("<h3>Scenario catalog</h3>\n");
  pg.table_head({"Scenario", "Kind", "Fault", "Severity", "Features"},
                "Stress scenarios on the " + d.scenario_catalog.base_split + " split");
  for (const auto& s : d.scenario_catalog.scenarios) {
    std::string feats;
    for (const auto& f : s.features) feats += (feats.empty() ? "" : ", ") + f;
    if (s.kind == ScenarioKind::real_slice) {
      pg.row({s.name, "real_slice", "-", "-", s.batch_id ? "batch " + *s.batch_id : "time range"});
    } else {
      pg.row({s.name, "synthetic_fault", to_string(s.fault), format_sig4(s.severity), feats});
    }
  }
  pg.table_end();

  pg.raw("<h3>Distributional diagnostics</h3>\n");
  const auto& diag = d.diagnostics;
  pg.table_head({"Scenario", "Score", "Most shifted feature", "KS", "W1", "Normalized W1"},
                "Divergence from training data");
  for (const auto& r : diag.divergence) {
    const FeatureDivergence* top = nullptr;
    for (const auto& f : r.features) {
      if (!r.ranking.empty() && f.feature == r.ranking.front()) top = &f;
    }
    if (top) {
      pg.row({r.scenario, format_sig4(r.score), top->feature, format_sig4(top->ks_statistic),
              format_sig4(top->wasserstein1), format_sig4(top->normalized_wasserstein)});
    } else {
      pg.row({r.scenario, format_sig4(r.score), "-", "-", "-", "-"});
    }
  }
  pg.table_end();
  for (const auto& ov : diag.kde_overlays) kde_overlay_svg(pg, doc, ov);
  pg.close_section();
}

void evaluation_section(Page& pg, const IarcDocument& doc) {
  const auto& ev = doc.evaluation;
  pg.open_section("evaluation", "Evaluation", ev.regulation);

  pg.raw("<h3>Acceptance thresholds</h3>\n");
  pg.table_head({"Metric", "Model version", "Slice", "Orientation", "Value", "Threshold", "Result"});
  for (const auto& k : ev.kpis) {
    pg.f("<tr><td>{}</td><td>{}</td><td>{}</td><td>{}</td><td>{}</td><td>{}</td>"
         "<td class=\"{}\">{}</td></tr>\n",
         html_escape(k.metric), html_escape(k.model_version), html_escape(k.slice_name),
         orientation_name(k.orientation), num(k.value), format_sig4(k.threshold),
         k.passed ? "pass" : "fail", k.passed ? "pass" : "fail");
  }
  pg.table_end();

  pg.raw("<h3>Performance and uncertainty</h3>\n");
  for (const auto& r : ev.uq) {
    pg.table_head({"Metric", "Value", "Orientation"},
                  fmt::format("Model {} on {} (n = {}, imputed rows = {})", r.model_version,
                              r.slice_name, r.n, r.imputed_rows));
    for (const auto& m : r.metrics) {
      std::string orient = orientation_name(m.orientation);
      if (m.target) orient += " " + format_sig4(*m.target);
      pg.row({m.name, num(m.value), orient});
    }
    pg.table_end();
  }
  for (const auto& r : ev.uq) {
    if (r.task == Task::regression) {
      coverage_svg(pg, r);
    } else {
      reliability_svg(pg, r);
    }
  }

  pg.raw("<h3>Robustness</h3>\n");
  const auto& rob = ev.robustness;
  std::vector<std::string> axes;
  std::vector<RadarSeries> series;
  if (rob.comparison && !rob.comparison->scenarios.empty()) {
    const auto& c = *rob.comparison;
    axes = c.scenarios;
    for (std::size_t v = 0; v < c.versions.size(); ++v) {
      RadarSeries s{c.versions[v], {}};
      for (std::size_t i = 0; i < c.scenarios.size(); ++i) s.values.push_back(c.retention[i][v]);
      series.push_back(std::move(s));
    }
  } else if (!rob.summaries.empty()) {
    const auto& sum = rob.summaries.front();
    RadarSeries s{sum.model_version, {}};
    for (const auto& r : sum.scenarios) {
      axes.push_back(r.scenario);
      s.values.push_back(r.retention);
    }
    series.push_back(std::move(s));
  }
  radar_svg(pg, axes, series);
  {
    pg.raw("<table>\n<caption>Retention per scenario (radar data)</caption>\n<thead><tr>"
           "<th scope=\"col\">Scenario</th>");
    for (const auto& s : series) pg.f("<th scope=\"col\">{}</th>", html_escape(s.label));
    pg.raw("</tr></thead>\n<tbody>\n");
    for (std::size_t i = 0; i < axes.size(); ++i) {
      pg.f("<tr><td>{}</td>", html_escape(axes[i]));
      for (const auto& s : series) pg.f("<td>{}</td>", format_sig4(s.values[i]));
      pg.raw("</tr>\n");
    }
    pg.table_end();
  }
  if (rob.comparison) {
    const auto& c = *rob.comparison;
    pg.table_head({"Model version", "Date", "Aggregated robustness (common scenarios)"},
                  "Version comparison");
    for (std::size_t v = 0; v < c.versions.size(); ++v) {
      pg.row({c.versions[v], c.dates[v], format_sig4(c.aggregated[v])});
    }
    pg.table_end();
  }
  for (const auto& sum : rob.summaries) {
    pg.table_head({"Scenario", "Family", "Severity", "Baseline", "Scenario value", "Retention"},
                  fmt::format("Model {}: {} retention, aggregated robustness {}", sum.model_version,
                              sum.primary_metric, format_sig4(sum.aggregated_robustness)));
    for (const auto& r : sum.scenarios) {
      pg.row({r.scenario, r.family, num(r.severity), format_sig4(r.baseline_value),
              num(r.scenario_value), format_sig4(r.retention)});
    }
    pg.table_end();
    if (!sum.weakest_scenarios.empty()) {
      pg.raw("<p>Weakest scenarios: ");
      const std::size_t shown = std::min<std::size_t>(3, sum.weakest_scenarios.size());
      for (std::size_t i = 0; i < shown; ++i) {
        if (i) pg.raw(", ");
        pg.text(sum.weakest_scenarios[i]);
      }
      pg.raw("</p>\n");
    }
    severity_svg(pg, sum);
    pg.table_head({"Family", "Severity", "Value", "Retention"},
                  fmt::format("Severity curves, model {}", sum.model_version));
    for (const auto& c : sum.curves) {
      for (const auto& p : c.points) {
        pg.row({c.family, format_sig4(p.severity), format_sig4(p.value), num(p.retention)});
      }
    }
    pg.table_end();
  }

  pg.raw("<h3>Methodology notes</h3>\n<ul>\n");
  for (const auto& n : ev.methodology_notes) {
    pg.raw("<li>");
    pg.text(n);
    pg.raw("</li>\n");
  }
  pg.raw("</ul>\n");
  pg.close_section();
}

void limitations_section(Page& pg, const IarcDocument& doc) {
  pg.open_section("limitations", "Limitations", kRegulationLimitations);
  pg.raw("<ul>\n");
  for (const auto& l : doc.limitations) {
    pg.raw("<li>");
    pg.text(l);
    pg.raw("</li>\n");
  }
  pg.raw("</ul>\n");
  pg.close_section();
}

// "</" inside the data block would end the script element early.
std::string embed_json(const std::string& json) {
  std::string out;
  out.reserve(json.size());
  for (std::size_t i = 0; i < json.size(); ++i) {
    if (json[i] == '<' && i + 1 < json.size() && json[i + 1] == '/') {
      out += "<\\/";
      ++i;
    } else {
      out += json[i];
    }
  }
  return out;
}

}  // namespace

std::string render_html(const IarcDocument& doc, const HtmlOptions& options) {
  Page pg;
  const auto& gi = doc.general_information;
  pg.raw("<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n");
  pg.f("<title>Industrial AI Robustness Card: {} {}</title>\n", html_escape(gi.model_name),
       html_escape(gi.model_version));
  pg.f("<style>\n{}</style>\n", kStyle);
  if (options.collapsible) pg.raw(kToggleScript);
  pg.raw("</head>\n<body>\n");
  pg.f("<h1>Industrial AI Robustness Card</h1>\n<p>{} {} &middot; dataset {} &middot; {}</p>\n",
       html_escape(gi.model_name), html_escape(gi.model_version), html_escape(gi.dataset_name),
       html_escape(gi.date));
  if (options.collapsible) {
    pg.raw("<p><button type=\"button\" onclick=\"iarcToggle(true)\">Expand all</button> "
           "<button type=\"button\" onclick=\"iarcToggle(false)\">Collapse all</button></p>\n");
  }
  general_section(pg, doc);
  intended_use_section(pg, doc);
  data_section(pg, doc);
  evaluation_section(pg, doc);
  limitations_section(pg, doc);
  pg.f("<script type=\"application/json\" id=\"iarc-card-data\">\n{}</script>\n",
       embed_json(serialize_json(doc)));
  pg.raw("</body>\n</html>\n");
  return pg.take();
}

}  // namespace iarc
