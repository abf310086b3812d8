#include <doctest.h>

#include <numeric>
#include <set>

#include "iarc/error.hpp"
#include "iarc/rng.hpp"
#include "iarc/splits.hpp"

using namespace iarc;

namespace {

std::vector<std::size_t> range(std::size_t a, std::size_t b) {
  std::vector<std::size_t> v(b - a);
  std::iota(v.begin(), v.end(), a);
  return v;
}

TimeSeriesDataset rows(std::size_t n) {
  std::vector<double> ts(n), v(n);
  std::iota(ts.begin(), ts.end(), 0.0);
  return TimeSeriesDataset::create("n", {"x"}, ts, v);
}

TimeSeriesDataset batches(std::size_t count, std::size_t per) {
  std::vector<double> ts, v;
  std::vector<std::string> ids;
  for (std::size_t b = 0; b < count; ++b) {
    for (std::size_t i = 0; i < per; ++i) {
      ts.push_back(static_cast<double>(i));
      v.push_back(static_cast<double>(b));
      ids.push_back("B" + std::to_string(b));
    }
  }
  return TimeSeriesDataset::create("g", {"x"}, ts, v, ids);
}

SplitConfig chrono(std::array<double, 4> f, std::size_t purge) {
  SplitConfig c;
  c.fractions = f;
  c.purge_gap = purge;
  return c;
}

std::set<std::string> batch_set(const TimeSeriesDataset& ds, const std::vector<std::size_t>& r) {
  std::set<std::string> out;
  for (auto i : r) out.insert((*ds.batch_ids())[i]);
  return out;
}

}  // namespace

TEST_CASE("chronological boundaries without purge") {
  const auto sa = chronological_split(rows(10), chrono({0.5, 0.2, 0, 0.3}, 0));
  CHECK(sa.train() == range(0, 5));
  CHECK(sa.validation() == range(5, 7));
  CHECK(sa.calibration().empty());
  CHECK(sa.test() == range(7, 10));
  CHECK(sa.purged.empty());
}

TEST_CASE("chronological boundaries with purge 1") {
  const auto cfg = chrono({0.5, 0.2, 0, 0.3}, 1);
  const auto sa = chronological_split(rows(10), cfg);
  CHECK(sa.train() == range(0, 5));
  CHECK(sa.validation() == std::vector<std::size_t>{6});
  CHECK(sa.test() == std::vector<std::size_t>{8, 9});
  CHECK(sa.purged == std::vector<std::size_t>{5, 7});
  CHECK(validate_splits(rows(10), sa, cfg).passed);
}

TEST_CASE("degenerate all-train split") {
  const auto sa = chronological_split(rows(4), chrono({1, 0, 0, 0}, 3));
  CHECK(sa.train() == range(0, 4));
  CHECK(sa.validation().empty());
  CHECK(sa.test().empty());
}

TEST_CASE("purging a split empty is infeasible") {
  try {
    chronological_split(rows(10), chrono({0.5, 0.2, 0, 0.3}, 2));
    FAIL("expected infeasible split");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::infeasible_split);
  }
}

TEST_CASE("bad fractions are a configuration error") {
  try {
    chronological_split(rows(10), chrono({0.5, 0.2, 0, 0.2}, 0));
    FAIL("expected configuration error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::configuration);
  }
}

TEST_CASE("group split basics") {
  SplitConfig cfg;
  cfg.mode = SplitMode::group;
  cfg.seed = 11;

  SUBCASE("one batch all train") {
    cfg.fractions = {1, 0, 0, 0};
    const auto ds = batches(1, 5);
    const auto sa = group_split(ds, cfg);
    CHECK(sa.train() == range(0, 5));
  }
  SUBCASE("determinism") {
    const auto ds = batches(9, 7);
    CHECK(group_split(ds, cfg) == group_split(ds, cfg));
  }
  SUBCASE("four equal batches fill 2/1/0/1") {
    cfg.fractions = {0.5, 0.25, 0, 0.25};
    const auto ds = batches(4, 6);
    const auto sa = group_split(ds, cfg);
    CHECK(batch_set(ds, sa.train()).size() == 2);
    CHECK(batch_set(ds, sa.validation()).size() == 1);
    CHECK(sa.calibration().empty());
    CHECK(batch_set(ds, sa.test()).size() == 1);
    CHECK(validate_splits(ds, sa, cfg).passed);

    // Greedy replay: shuffle with the same seed, then pour in order.
    std::vector<std::string> order = {"B0", "B1", "B2", "B3"};
    Rng rng(cfg.seed);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
    CHECK(batch_set(ds, sa.train()) == std::set<std::string>{order[0], order[1]});
    CHECK(batch_set(ds, sa.validation()) == std::set<std::string>{order[2]});
    CHECK(batch_set(ds, sa.test()) == std::set<std::string>{order[3]});
  }
  SUBCASE("too few batches") {
    cfg.fractions = {0.4, 0.2, 0.2, 0.2};
    try {
      group_split(batches(3, 4), cfg);
      FAIL("expected infeasible split");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::infeasible_split);
    }
  }
}

TEST_CASE("validate_splits detects violations") {
  const auto ds = rows(10);
  const auto cfg = chrono({0.5, 0.2, 0, 0.3}, 0);
  CHECK(validate_splits(ds, chronological_split(ds, cfg), cfg).passed);

  SUBCASE("overlap") {
    auto sa = chronological_split(ds, cfg);
    sa.parts[3].insert(sa.parts[3].begin(), 3);
    const auto v = validate_splits(ds, sa, cfg);
    CHECK_FALSE(v.passed);
    bool found = false;
    for (const auto& x : v.violations) {
      if (x.kind == "overlap" && x.indices == std::vector<std::size_t>{3}) found = true;
    }
    CHECK(found);
  }
  SUBCASE("purge gap too small") {
    const auto strict = chrono({0.5, 0.2, 0, 0.3}, 2);
    const auto v = validate_splits(ds, chronological_split(ds, cfg), strict);
    CHECK_FALSE(v.passed);
    CHECK(v.violations.at(0).kind == "purge");
  }
  SUBCASE("group overlap") {
    const auto g = batches(2, 3);
    SplitConfig gc;
    gc.mode = SplitMode::group;
    gc.fractions = {0.5, 0, 0, 0.5};
    SplitAssignment sa;
    sa.parts[0] = {0, 1, 3};
    sa.parts[3] = {2, 4, 5};
    const auto v = validate_splits(g, sa, gc);
    CHECK_FALSE(v.passed);
    CHECK(v.violations.at(0).kind == "group_overlap");
  }
}

TEST_CASE("split JSON round trip") {
  SplitConfig cfg = chrono({0.6, 0.1, 0.15, 0.15}, 3);
  Json j = cfg;
  CHECK(j.get<SplitConfig>() == cfg);
  const auto sa = chronological_split(rows(40), cfg);
  Json js = sa;
  CHECK(js.get<SplitAssignment>() == sa);
}
