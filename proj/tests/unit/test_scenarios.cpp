#include <doctest.h>

#include <cmath>

#include "iarc/error.hpp"
#include "iarc/rng.hpp"
#include "iarc/scenarios.hpp"

using namespace iarc;

namespace {

TimeSeriesDataset series(std::size_t n, std::uint64_t seed, const std::string& batch = "B0") {
  Rng rng(seed);
  std::vector<double> ts(n), values;
  for (std::size_t r = 0; r < n; ++r) {
    ts[r] = static_cast<double>(r);
    values.push_back(rng.normal());
    values.push_back(10.0 + rng.normal());
  }
  return TimeSeriesDataset::create("base", {"a", "b"}, ts, values,
                                   std::vector<std::string>(n, batch));
}

ScenarioSpec fault(FaultType f, double s, std::vector<std::string> features = {"a"}) {
  ScenarioSpec spec;
  spec.name = "f";
  spec.fault = f;
  spec.severity = s;
  spec.features = std::move(features);
  spec.seed = 1234;
  return spec;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an iarc::Error");
  return ErrorKind::io;
}

}  // namespace

TEST_CASE("stuck_at at full severity holds half the rows") {
  const auto ds = series(10, 1);
  const auto out = apply_fault(ds, fault(FaultType::stuck_at, 1.0));
  const auto col = out.column(0);
  std::size_t longest = 1, run = 1;
  for (std::size_t r = 1; r < col.size(); ++r) {
    run = col[r] == col[r - 1] ? run + 1 : 1;
    longest = std::max(longest, run);
  }
  CHECK(longest >= 5);
}

TEST_CASE("tiny severity is nearly the identity") {
  const auto ds = series(200, 2);
  const auto out = apply_fault(ds, fault(FaultType::gaussian_noise, 1e-9));
  const double sigma = sample_std(ds.column(0));
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    CHECK(std::abs(out.at(r, 0) - ds.at(r, 0)) < 1e-6 * sigma);
  }
}

TEST_CASE("faults are deterministic and local") {
  const auto ds = series(100, 3);
  for (auto f : {FaultType::gaussian_noise, FaultType::drift_ramp, FaultType::stuck_at,
                 FaultType::spike, FaultType::dropout}) {
    const auto spec = fault(f, 0.7);
    const auto x = apply_fault(ds, spec), y = apply_fault(ds, spec);
    CHECK(canonical_bytes(x) == canonical_bytes(y));
    // Untargeted column and timestamps untouched.
    CHECK(canonical_bytes(x.select_features(std::vector<std::string>{"b"})) ==
          canonical_bytes(ds.select_features(std::vector<std::string>{"b"})));
    CHECK(x.timestamps() == ds.timestamps());
    // Different seeds give different perturbations.
    auto other = spec;
    other.seed = 4321;
    if (f != FaultType::drift_ramp) {
      CHECK(canonical_bytes(apply_fault(ds, other)) != canonical_bytes(x));
    }
  }
}

TEST_CASE("drift ramp reaches its anchor at the last row") {
  const auto ds = series(50, 4);
  const auto out = apply_fault(ds, fault(FaultType::drift_ramp, 0.5), {{"a", 2.0}});
  CHECK(out.at(0, 0) == ds.at(0, 0));
  CHECK(out.at(49, 0) - ds.at(49, 0) == doctest::Approx(3.0 * 0.5 * 2.0));
}

TEST_CASE("fault preconditions") {
  const auto ds = series(10, 5);
  CHECK(kind_of([&] { apply_fault(ds, fault(FaultType::spike, 0.0)); }) == ErrorKind::validation);
  CHECK(kind_of([&] { apply_fault(ds, fault(FaultType::spike, 1.5)); }) == ErrorKind::validation);
  CHECK(kind_of([&] { apply_fault(ds, fault(FaultType::spike, 0.5, {"nope"})); }) ==
        ErrorKind::validation);
}

TEST_CASE("real slices") {
  ScenarioSpec spec;
  spec.name = "slice";
  spec.kind = ScenarioKind::real_slice;

  SUBCASE("only batch") {
    const auto ds = series(10, 6);
    spec.batch_id = "B0";
    const auto out = slice_scenario(ds, spec);
    CHECK(out.dataset_version() == ds.dataset_version());
    CHECK(out.rows() == 10);
  }
  SUBCASE("time range covering rows 2..4") {
    const auto ds = series(10, 6);
    spec.time_range = std::make_pair(2.0, 4.0);
    CHECK(slice_scenario(ds, spec).rows() == 3);
  }
  SUBCASE("nonexistent batch") {
    spec.batch_id = "B9";
    CHECK(kind_of([&] { slice_scenario(series(10, 6), spec); }) == ErrorKind::empty_scenario);
  }
}

TEST_CASE("catalog expansion and errors") {
  const Json config = Json::parse(R"({
    "scenarios": [
      {"name": "noise", "fault": "gaussian_noise", "features": ["a"], "severities": [0.2, 0.5, 1.0], "seed": 3},
      {"name": "ramp", "fault": "drift_ramp", "features": ["a", "b"], "severities": [0.2, 0.5, 1.0]}
    ]})");
  const auto cat = build_catalog(config);
  CHECK(cat.scenarios.size() == 6);
  REQUIRE(cat.find("noise@0.5"));
  CHECK(cat.find("noise@0.5")->severity == 0.5);
  CHECK(cat.find("ramp@1")->family() == "drift_ramp[a,b]");

  Json round;
  round = cat;
  CHECK(round.get<ScenarioCatalog>() == cat);
  CHECK(build_catalog(round) == cat);

  CHECK(kind_of([] { build_catalog(Json::parse(R"({"scenarios": []})")); }) ==
        ErrorKind::validation);
  CHECK(kind_of([] { build_catalog(Json::object()); }) == ErrorKind::validation);

  const Json dup = Json::parse(R"({"scenarios": [
      {"name": "x", "fault": "spike", "features": ["a"], "severity": 0.5},
      {"name": "x", "fault": "spike", "features": ["a"], "severity": 0.7}]})");
  try {
    build_catalog(dup);
    FAIL("expected duplicate error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::validation);
    CHECK(std::string(e.what()).find("'x'") != std::string::npos);
  }
}
