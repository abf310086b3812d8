#include <doctest.h>

#include <fstream>

#include "../common/oracles.hpp"
#include "iarc/dataset.hpp"
#include "iarc/error.hpp"
#include "iarc/hashing.hpp"
#include "iarc/quality.hpp"
#include "iarc/rng.hpp"

using namespace iarc;

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream(path) << text;
}

TimeSeriesDataset one_column(std::vector<double> v) {
  std::vector<double> ts(v.size());
  for (std::size_t i = 0; i < ts.size(); ++i) ts[i] = static_cast<double>(i);
  return TimeSeriesDataset::create("t", {"x"}, ts, v);
}

template <class Fn>
ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an iarc::Error");
  return ErrorKind::io;
}

std::string message_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("load_csv reads a complete three-row file") {
  TempDir dir("csv3");
  write_text(dir.file("a.csv"), "timestamp,temp,pH\n0,1.5,7\n1,1.6,7.1\n2,1.7,7.2\n");
  const auto ds = load_csv(dir.file("a.csv"), {});
  CHECK(ds.rows() == 3);
  CHECK(ds.cols() == 2);
  const auto q = compute_quality(ds, Stage::raw);
  for (const auto& f : q.features) CHECK(f.missingness_rate == 0.0);
  CHECK(ds.dataset_version().rfind("sha256:", 0) == 0);
  CHECK(load_csv(dir.file("a.csv"), {}).dataset_version() == ds.dataset_version());
}

TEST_CASE("one empty pH cell in four rows gives missingness 0.25") {
  TempDir dir("csvmiss");
  write_text(dir.file("a.csv"), "timestamp,pH\n0,7\n1,\n2,NaN\n3,7.2\n");
  auto ds = load_csv(dir.file("a.csv"), {});
  auto q = compute_quality(ds, Stage::raw);
  // "NaN" is also a missing token
  CHECK(q.features[0].missingness_rate == doctest::Approx(0.5));
  write_text(dir.file("b.csv"), "timestamp,pH\n0,7\n1,\n2,7.1\n3,7.2\n");
  q = compute_quality(load_csv(dir.file("b.csv"), {}), Stage::raw);
  CHECK(q.features[0].missing_count == 1);
  CHECK(q.features[0].missingness_rate == 0.25);
}

TEST_CASE("missing tokens hash identically") {
  TempDir dir("csvtok");
  write_text(dir.file("a.csv"), "timestamp,x\n0,1\n1,\n");
  write_text(dir.file("b.csv"), "timestamp,x\n0,1\n1,NaN\n");
  CHECK(load_csv(dir.file("a.csv"), {}, "d").dataset_version() ==
        load_csv(dir.file("b.csv"), {}, "d").dataset_version());
}

TEST_CASE("dataset_version is the sha256 of the canonical bytes") {
  const auto ds = one_column({1.0, 2.5, kMissing});
  CHECK(ds.dataset_version() == "sha256:" + sha256_hex(canonical_bytes(ds)));
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("load_csv errors") {
  TempDir dir("csverr");
  write_text(dir.file("bad.csv"), "timestamp,temp,pH\n0,1,7\n1,abc,7\n");
  CHECK(kind_of([&] { load_csv(dir.file("bad.csv"), {}); }) == ErrorKind::parse);
  const auto msg = message_of([&] { load_csv(dir.file("bad.csv"), {}); });
  CHECK(msg.find("temp") != std::string::npos);
  CHECK(msg.find('2') != std::string::npos);

  write_text(dir.file("nots.csv"), "time,temp\n0,1\n");
  CHECK(kind_of([&] { load_csv(dir.file("nots.csv"), {}); }) == ErrorKind::configuration);

  write_text(dir.file("empty.csv"), "timestamp,temp\n");
  CHECK(kind_of([&] { load_csv(dir.file("empty.csv"), {}); }) == ErrorKind::empty_dataset);
}

TEST_CASE("rows are stably sorted by batch then timestamp") {
  const auto ds = TimeSeriesDataset::create("s", {"x"}, {2, 1, 1, 0}, {10, 20, 30, 40},
                                            std::vector<std::string>{"b", "b", "a", "b"});
  CHECK(ds.column(0) == std::vector<double>{30, 40, 20, 10});
  CHECK(ds.batches() == std::vector<std::string>{"a", "b"});
}

TEST_CASE("CSV round trip preserves content") {
  TempDir dir("csvrt");
  const auto ds = TimeSeriesDataset::create("r", {"x", "y"}, {0, 1, 2},
                                            {0.1, kMissing, 1e-17, 3.0, -2.5, 1.0 / 3.0},
                                            std::vector<std::string>{"B1", "B1", "B2"});
  CsvColumns cols;
  cols.batch = "batch";
  write_csv(ds, dir.file("o.csv"), cols);
  const auto back = load_csv(dir.file("o.csv"), cols, "r");
  CHECK(back.dataset_version() == ds.dataset_version());
}

TEST_CASE("ISO timestamps parse to epoch seconds") {
  CHECK(parse_timestamp("1970-01-01T00:01:00Z") == 60.0);
  CHECK(parse_timestamp("2024-01-01 00:00:00+01:00") == 1704063600.0);
  CHECK(parse_timestamp("12.5") == 12.5);
  CHECK_FALSE(parse_timestamp("yesterday").has_value());
}

TEST_CASE("quality statistics") {
  SUBCASE("constant column") {
    const auto q = compute_quality(one_column({5, 5, 5}), Stage::raw);
    REQUIRE(q.features[0].stats);
    CHECK(q.features[0].stats->std == 0.0);
    CHECK(q.features[0].stats->min == 5.0);
    CHECK(q.features[0].stats->max == 5.0);
  }
  SUBCASE("half missing") {
    const auto q = compute_quality(one_column({1, kMissing}), Stage::raw);
    CHECK(q.features[0].missingness_rate == 0.5);
  }
  SUBCASE("linear interpolation median") {
    const auto q = compute_quality(one_column({4, 1, 3, 2}), Stage::preprocessed);
    CHECK(q.features[0].stats->p50 == 2.5);
    CHECK(q.features[0].stats->p25 == doctest::Approx(1.75));
    CHECK(q.stage == Stage::preprocessed);
  }
  SUBCASE("all missing has no stats") {
    const auto q = compute_quality(one_column({kMissing, kMissing}), Stage::raw);
    CHECK_FALSE(q.features[0].stats.has_value());
    CHECK(q.features[0].missingness_rate == 1.0);
  }
}

TEST_CASE("windowed drift scan") {
  SUBCASE("constant series") {
    const auto s = windowed_drift_scan(one_column(std::vector<double>(20, 3.0)), 4);
    CHECK(s.features[0].ks.size() == 3);
    for (const auto& k : s.features[0].ks) CHECK(k.value() == 0.0);
  }
  SUBCASE("step series") {
    const auto s = windowed_drift_scan(one_column({0, 0, 0, 0, 1, 1, 1, 1}), 2);
    CHECK(s.features[0].ks.at(0).value() == 1.0);
  }
  SUBCASE("ramp halves match brute force") {
    std::vector<double> ramp;
    for (int i = 1; i <= 100; ++i) ramp.push_back(i);
    const auto s = windowed_drift_scan(one_column(ramp), 2);
    const std::vector<double> a(ramp.begin(), ramp.begin() + 50), b(ramp.begin() + 50, ramp.end());
    CHECK(s.features[0].ks.at(0).value() == oracle::ks(a, b));
    CHECK(s.features[0].ks.at(0).value() == 1.0);
  }
  SUBCASE("too many windows") {
    CHECK(kind_of([] { windowed_drift_scan(one_column({1, 2, 3}), 4); }) ==
          ErrorKind::configuration);
  }
}

TEST_CASE("derived seeds are stable and component specific") {
  CHECK(derive_seed(42, "split") == derive_seed(42, "split"));
  CHECK(derive_seed(42, "split") != derive_seed(42, "odd"));
  CHECK(derive_seed(42, "split") != derive_seed(43, "split"));
  const auto h = sha256(std::string("42/split"));
  std::uint64_t expect = 0;
  for (int i = 0; i < 8; ++i) expect = (expect << 8) | h[i];
  CHECK(derive_seed(42, "split") == expect);
}

TEST_CASE("run stamp round trips") {
  const auto stamp = make_run_stamp(7, "abc", "2026-01-01T00:00:00Z");
  CHECK(stamp.seed == 7);
  CHECK_FALSE(stamp.tool_version.empty());
  Json j = stamp;
  CHECK(j.get<RunStamp>() == stamp);
}
