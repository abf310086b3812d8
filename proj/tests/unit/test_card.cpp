#include <doctest.h>

#include <fstream>
#include <regex>
#include <sstream>

#include "../common/oracles.hpp"
#include "iarc/card.hpp"
#include "iarc/error.hpp"
#include "iarc/html_report.hpp"
#include "iarc/pipeline.hpp"

using namespace iarc;

namespace {

// Reduced demo shared by the card tests.
struct SmallDemo {
  TempDir dir{"carddemo"};
  CardBuild build;
  SmallDemo() {
    DemoOptions o;
    o.out = dir.path.string();
    o.batch_count = 10;
    o.steps_per_batch = 80;
    o.created_at = "2026-01-15T00:00:00Z";
    build = run_demo(o);
  }
};

const SmallDemo& demo() {
  static SmallDemo d;
  return d;
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

bool has_violation(const CardValidation& v, const std::string& kind, const std::string& pointer) {
  for (const auto& x : v.violations) {
    if (x.kind == kind && x.pointer.rfind(pointer, 0) == 0) return true;
  }
  return false;
}

UqReport mae_report(double mae) {
  UqReport r;
  r.model_version = "1.0.0";
  r.slice_name = "test";
  r.n = 10;
  r.regression = RegressionKpis{mae, mae, std::nullopt, 0};
  r.metrics = {{"mae", mae, Orientation::lower_better, {}}};
  return r;
}

}  // namespace

TEST_CASE("thresholds follow orientation") {
  CHECK_FALSE(threshold_passes(Orientation::lower_better, 1.0, 0.5));
  CHECK(threshold_passes(Orientation::lower_better, 0.5, 0.5));
  CHECK(threshold_passes(Orientation::higher_better, 0.9, 0.8));
  CHECK_FALSE(threshold_passes(Orientation::higher_better, 0.7, 0.8));
  CHECK_FALSE(threshold_passes(Orientation::lower_better, std::nullopt, 0.5));
}

TEST_CASE("demo card validates and round trips") {
  const auto& d = demo();
  const auto v = validate_card_text(d.build.json);
  for (const auto& x : v.violations) MESSAGE(x.pointer << " " << x.message);
  CHECK(v.passed);
  CHECK(d.build.json.back() == '\n');
  const auto doc = parse_card(d.build.json);
  CHECK(serialize_json(doc) == d.build.json);
  CHECK(serialize_json(parse_card(serialize_json(doc))) == serialize_json(doc));
  CHECK(validate_card(doc).passed);
}

TEST_CASE("canonical JSON has sorted keys") {
  const Json j = Json::parse(demo().build.json);
  std::function<void(const Json&)> walk = [&](const Json& node) {
    if (node.is_object()) {
      std::string prev;
      bool first = true;
      for (auto it = node.begin(); it != node.end(); ++it) {
        if (!first) CHECK(prev < it.key());
        prev = it.key();
        first = false;
        walk(it.value());
      }
    } else if (node.is_array()) {
      for (const auto& x : node) walk(x);
    }
  };
  walk(j);
  CHECK(j.dump(1).size() > 0);
}

TEST_CASE("card invariants hold on the demo") {
  const Json j = Json::parse(demo().build.json);
  for (const auto& section :
       {"general_information", "intended_use", "data", "evaluation", "limitations"}) {
    CHECK(j.contains(section));
  }
  for (const auto& uq : j["evaluation"]["uq"]) {
    CHECK(uq.contains("slice_name"));
    CHECK(uq.contains("model_version"));
    for (const auto& m : uq["metrics"]) CHECK(m.contains("orientation"));
  }
  const auto lims = j["limitations"].get<std::vector<std::string>>();
  bool surrogate = false;
  for (const auto& l : lims) surrogate = surrogate || l.find("surrogate") != std::string::npos;
  CHECK(surrogate);
}

TEST_CASE("validation failures") {
  const Json good = Json::parse(demo().build.json);

  SUBCASE("deleted evaluation section") {
    Json j = good;
    j.erase("evaluation");
    const auto v = validate_card(j);
    CHECK_FALSE(v.passed);
    CHECK(has_violation(v, "missing_section", "/evaluation"));
  }
  SUBCASE("tampered threshold result") {
    Json j = good;
    REQUIRE_FALSE(j["evaluation"]["kpis"].empty());
    auto& k = j["evaluation"]["kpis"][0];
    k["passed"] = !k["passed"].get<bool>();
    const auto v = validate_card(j);
    CHECK_FALSE(v.passed);
    CHECK(has_violation(v, "consistency", "/evaluation/kpis/0"));
  }
  SUBCASE("tampered aggregate") {
    Json j = good;
    j["evaluation"]["robustness"]["summaries"][0]["aggregated_robustness"] = 0.0123;
    CHECK(has_violation(validate_card(j), "consistency", "/evaluation/robustness"));
  }
  SUBCASE("empty general information field") {
    Json j = good;
    j["general_information"]["provider"] = "";
    CHECK_FALSE(validate_card(j).passed);
  }
  SUBCASE("unknown top-level key") {
    Json j = good;
    j["extra"] = 1;
    CHECK(has_violation(validate_card(j), "schema", ""));
  }
  SUBCASE("dropped limitation") {
    Json j = good;
    j["limitations"] = Json::array({"nothing to see"});
    const auto v = validate_card(j);
    bool unlisted = false;
    for (const auto& x : v.violations) {
      unlisted = unlisted || (x.kind == "consistency" &&
                              x.message.find("not listed under limitations") != std::string::npos);
    }
    CHECK(unlisted);
  }
  SUBCASE("malformed text") {
    const auto v = validate_card_text("{not json");
    CHECK_FALSE(v.passed);
    CHECK(v.violations.at(0).kind == "parse");
  }
}

TEST_CASE("metadata errors name the JSON pointer") {
  const Json meta = read_json_file(demo().dir.file("inputs/metadata.json"));
  CHECK_NOTHROW(parse_metadata(meta));
  Json broken = meta;
  broken["general_information"].erase("provider");
  try {
    parse_metadata(broken);
    FAIL("expected validation error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::validation);
    CHECK(std::string(e.what()).find("/general_information/provider") != std::string::npos);
  }
}

TEST_CASE("assembled KPI records a failed threshold") {
  const auto& d = demo();
  CardInputs in;
  in.metadata = parse_metadata(read_json_file(d.dir.file("inputs/metadata.json")));
  in.metadata.thresholds = {{"mae", 0.5, "test", std::nullopt}};
  in.run_stamp = d.build.doc.general_information.run_stamp;
  in.dataset_name = "surrogate";
  in.dataset_version = "sha256:0";
  in.quality_raw = d.build.doc.data.quality_raw;
  in.quality_preprocessed = d.build.doc.data.quality_preprocessed;
  in.catalog = d.build.doc.data.scenario_catalog;
  in.uq = {mae_report(1.0)};
  in.robustness = d.build.doc.evaluation.robustness.summaries;
  const auto doc = assemble_card(in);
  REQUIRE(doc.evaluation.kpis.size() == 1);
  CHECK(doc.evaluation.kpis[0].value.value() == 1.0);
  CHECK_FALSE(doc.evaluation.kpis[0].passed);
  CHECK(doc.evaluation.kpis[0].orientation == Orientation::lower_better);

  in.uq = {mae_report(0.25)};
  CHECK(assemble_card(in).evaluation.kpis[0].passed);
  CHECK(serialize_json(assemble_card(in)) == serialize_json(assemble_card(in)));
}

TEST_CASE("HTML report structure") {
  const auto& html = demo().build.html;
  CHECK(count(html, "<svg class=\"radar\"") == 1);
  CHECK(count(html, "<svg class=\"kde-overlay\"") >= 1);
  CHECK(count(html, "class=\"radar-series\"") == 2);
  CHECK(count(html, "class=\"card-section\"") == 5);
  CHECK(count(html, "<details open") == 5);
  CHECK(html.find("<script") != std::string::npos);  // only the JSON data block
  CHECK(html.find("src=\"http") == std::string::npos);
  CHECK(html.find("href=\"http") == std::string::npos);

  const std::string open = "<script type=\"application/json\" id=\"iarc-card-data\">";
  const auto a = html.find(open);
  REQUIRE(a != std::string::npos);
  const auto b = html.find("</script>", a);
  std::string embedded = html.substr(a + open.size(), b - a - open.size());
  embedded = std::regex_replace(embedded, std::regex("<\\\\/"), "</");
  CHECK(Json::parse(embedded) == Json::parse(demo().build.json));

  // Plain output has exactly one script (the data block); collapsible adds a toggle.
  CHECK(count(html, "<script") == 1);
  HtmlOptions opts;
  opts.collapsible = true;
  CHECK(count(render_html(demo().build.doc, opts), "<script") == 2);
}

TEST_CASE("HTML numbers use four significant digits") {
  CHECK(format_sig4(0.123456) == "0.1235");
  CHECK(format_sig4(1234.5) == "1234");
  CHECK(format_sig4(2.0) == "2");
  CHECK(html_escape("<a & \"b\">") == "&lt;a &amp; &quot;b&quot;&gt;");
  // Every aggregated robustness value shown appears in the JSON at the same precision.
  const auto& doc = demo().build.doc;
  for (const auto& s : doc.evaluation.robustness.summaries) {
    CHECK(demo().build.html.find(format_sig4(s.aggregated_robustness)) != std::string::npos);
  }
}

TEST_CASE("shipped schema file matches the compiled-in copy") {
  const Json on_disk = read_json_file(std::string(IARC_SOURCE_DIR) + "/schema/iarc_card.schema.json");
  CHECK(on_disk == card_schema());
}
