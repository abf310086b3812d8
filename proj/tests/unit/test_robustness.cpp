#include <doctest.h>

#include "iarc/error.hpp"
#include "iarc/rng.hpp"
#include "iarc/robustness.hpp"

using namespace iarc;

namespace {

std::vector<MetricValue> mae(double v) { return {{"mae", v, Orientation::lower_better, {}}}; }

ScenarioOutcome outcome(std::string name, std::string family, std::optional<double> s,
                        double v) {
  return {std::move(name), std::move(family), s, mae(v)};
}

double mae_of(const std::vector<double>& y, const std::vector<double>& yhat) {
  double t = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) t += std::abs(y[i] - yhat[i]);
  return t / static_cast<double>(y.size());
}

}  // namespace

TEST_CASE("retention examples") {
  CHECK(retention(2.0, 2.0, Orientation::lower_better) == 1.0);
  CHECK(retention(2.0, 4.0, Orientation::lower_better) == 0.5);
  CHECK(retention(2.0, 1.0, Orientation::lower_better) == 1.0);
  CHECK(retention(0.8, 0.4, Orientation::higher_better) == 0.5);
  CHECK(retention(0.8, 0.9, Orientation::higher_better) == 1.0);
  bool flagged = false;
  CHECK(retention(1.0, std::numeric_limits<double>::infinity(), Orientation::lower_better,
                  &flagged) == 0.0);
  CHECK(flagged);
  CHECK_THROWS_AS(retention(1.0, 1.0, Orientation::target), Error);
}

TEST_CASE("retention is scale invariant for lower_better") {
  Rng rng(8);
  for (int i = 0; i < 100; ++i) {
    const double b = 0.1 + rng.uniform(), s = 0.1 + 2 * rng.uniform(), k = 0.01 + 100 * rng.uniform();
    CHECK(retention(k * b, k * s, Orientation::lower_better) ==
          doctest::Approx(retention(b, s, Orientation::lower_better)).epsilon(1e-12));
  }
}

TEST_CASE("summary aggregation") {
  const auto s = build_summary({outcome("a", "f", 0.5, 1.0), outcome("b", "f", 1.0, 2.0)}, mae(1.0),
                               "mae", "v1");
  CHECK(s.aggregated_robustness == 0.75);
  CHECK(s.weakest_scenarios.front() == "b");
  CHECK(s.family_mean_retention.at("f") == 0.75);
  REQUIRE(s.curves.size() == 1);
  CHECK(s.curves[0].points.size() == 2);
  CHECK(s.curves[0].points[1].retention.value() == 0.5);
}

TEST_CASE("summary at baseline everywhere") {
  const auto s = build_summary({outcome("a", "f", 0.2, 1.0), outcome("b", "f", 0.5, 1.0),
                                outcome("c", "f", 1.0, 1.0), outcome("r", "real_slice", {}, 0.5)},
                               mae(1.0), "mae", "v1");
  CHECK(s.aggregated_robustness == 1.0);
  for (const auto& p : s.curves.at(0).points) CHECK(p.retention.value() == 1.0);
  // Ties are broken by scenario name.
  CHECK(s.weakest_scenarios == std::vector<std::string>{"a", "b", "c", "r"});
}

TEST_CASE("scenario without the primary metric is excluded") {
  ScenarioOutcome odd{"x", "f", 0.5, {{"rmse", 1.0, Orientation::lower_better, {}}}};
  const auto s = build_summary({outcome("a", "f", 0.2, 2.0), odd}, mae(1.0), "mae", "v1");
  CHECK(s.scenarios.size() == 1);
  CHECK_FALSE(s.warnings.empty());
}

TEST_CASE("aggregated robustness stays in [0, 1]") {
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    std::vector<ScenarioOutcome> res;
    for (int i = 0; i < 6; ++i) res.push_back(outcome("s" + std::to_string(i), "f", {}, 3 * rng.uniform()));
    const auto s = build_summary(res, mae(0.5 + rng.uniform()), "mae", "v");
    CHECK(s.aggregated_robustness >= 0.0);
    CHECK(s.aggregated_robustness <= 1.0);
    bool all_one = true;
    for (const auto& sr : s.scenarios) all_one = all_one && sr.retention == 1.0;
    CHECK((s.aggregated_robustness == 1.0) == all_one);
  }
}

TEST_CASE("version comparison") {
  const auto s1 = build_summary({outcome("a", "f", 0.5, 1.5), outcome("b", "f", 1.0, 3.0)},
                                mae(1.0), "mae", "v1");

  SUBCASE("single version") {
    const auto c = compare_versions({{"v1", "2025-01-01", s1}});
    CHECK(c.scenarios == std::vector<std::string>{"a", "b"});
    CHECK(c.retention[0][0] == s1.scenarios[0].retention);
    CHECK(c.retention[1][0] == s1.scenarios[1].retention);
    CHECK(c.aggregated[0] == doctest::Approx(s1.aggregated_robustness));
  }
  SUBCASE("duplicate version") {
    const auto c = compare_versions({{"v1", "2025-01-01", s1}, {"v1b", "2025-01-01", s1}});
    for (const auto& row : c.retention) CHECK(row[0] == row[1]);
  }
  SUBCASE("dominated version from noisier predictions") {
    Rng rng(12);
    std::vector<double> y(400), base(400), fault(400), fault_noisy(400);
    for (std::size_t i = 0; i < y.size(); ++i) {
      y[i] = rng.normal();
      base[i] = y[i] + rng.normal(0, 0.2);
      fault[i] = base[i] + rng.normal(0, 0.3);
      fault_noisy[i] = fault[i] + rng.normal(0, 0.5);
    }
    const double b = mae_of(y, base);
    const auto good = build_summary({outcome("a", "f", 0.5, mae_of(y, fault)),
                                     outcome("b", "f", 1.0, mae_of(y, fault) * 1.2)},
                                    mae(b), "mae", "new");
    const auto bad = build_summary({outcome("a", "f", 0.5, mae_of(y, fault_noisy)),
                                    outcome("b", "f", 1.0, mae_of(y, fault_noisy) * 1.2)},
                                   mae(b), "mae", "old");
    const auto c = compare_versions({{"new", "2025-06-01", good}, {"old", "2024-01-01", bad}});
    CHECK(c.versions == std::vector<std::string>{"old", "new"});
    for (const auto& row : c.retention) CHECK(row[0] <= row[1]);
  }
  SUBCASE("disjoint scenarios") {
    const auto s2 = build_summary({outcome("z", "f", 0.5, 1.5)}, mae(1.0), "mae", "v2");
    try {
      compare_versions({{"v1", "2025-01-01", s1}, {"v2", "2025-02-01", s2}});
      FAIL("expected comparison error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::comparison);
    }
  }
}

TEST_CASE("summary JSON round trip") {
  const auto s = build_summary({outcome("a", "f", 0.5, 1.5), outcome("b", "f", 1.0, 3.0)},
                               mae(1.0), "mae", "v1");
  Json j = s;
  CHECK(j.get<RobustnessSummary>() == s);
  const auto c = compare_versions({{"v1", "2025-01-01", s}});
  Json jc = c;
  CHECK(jc.get<VersionComparison>() == c);
}
