#include <doctest.h>

#include <cmath>

#include "../common/fixtures.hpp"
#include "../common/oracles.hpp"
#include "iarc/error.hpp"
#include "iarc/metrics.hpp"

using namespace iarc;

namespace {

PredictionSet regression(std::vector<double> y, std::vector<double> yhat) {
  PredictionSet p;
  p.model_version = "v";
  p.slice_name = "s";
  p.y_true = std::move(y);
  p.y_point = std::move(yhat);
  return p;
}

PredictionSet with_interval(std::vector<double> y, double lo_level, double hi_level, double l,
                            double u, double m) {
  auto p = regression(y, std::vector<double>(y.size(), m));
  p.levels = {lo_level, 0.5, hi_level};
  p.quantiles = {std::vector<double>(y.size(), l), std::vector<double>(y.size(), m),
                 std::vector<double>(y.size(), u)};
  return p;
}

PredictionSet classification(std::vector<int> labels, std::vector<std::vector<double>> probs) {
  PredictionSet p;
  p.task = Task::classification;
  p.model_version = "v";
  p.slice_name = "s";
  p.labels = std::move(labels);
  p.probabilities = std::move(probs);
  return p;
}

}  // namespace

TEST_CASE("regression KPIs") {
  auto k = regression_kpis(regression({1, 2, 3}, {1, 2, 3}));
  CHECK(k.mae == 0.0);
  CHECK(k.rmse == 0.0);
  CHECK(k.mape.value() == 0.0);

  k = regression_kpis(regression({0, 2}, {1, 1}));
  CHECK(k.mae == 1.0);
  CHECK(k.rmse == 1.0);
  CHECK(k.mape_skipped == 1);

  k = regression_kpis(regression({2, 4}, {3, 3}));
  CHECK(k.mape.value() == doctest::Approx(0.375).epsilon(1e-15));

  k = regression_kpis(regression({0, 0}, {1, 1}));
  CHECK_FALSE(k.mape.has_value());
}

TEST_CASE("interval metrics") {
  const auto p = with_interval({0, 1, 2, 3}, 0.05, 0.95, -0.5, 0.5, 0.0);
  const auto m = interval_metrics(p, 0.05, 0.95);
  CHECK(m.coverage == 0.25);
  CHECK(m.mpiw == 1.0);
  CHECK(m.nominal == doctest::Approx(0.9));
  CHECK(interval_metrics(with_interval({0, 1}, 0.1, 0.9, -1, 1, 0), 0.1, 0.9).mpiw == 2.0);
  CHECK(interval_metrics(with_interval({0, 1}, 0.1, 0.9, -5, 5, 0), 0.1, 0.9).coverage == 1.0);
  try {
    interval_metrics(p, 0.25, 0.75);
    FAIL("expected configuration error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::configuration);
  }
}

TEST_CASE("WIS worked rows") {
  CHECK(wis(with_interval({0.5}, 0.1, 0.9, 0, 1, 0.5)) == doctest::Approx(0.1 / 1.5).epsilon(1e-12));
  CHECK(std::abs(wis(with_interval({0.5}, 0.1, 0.9, 0, 1, 0.5)) - 0.0667) < 1e-4);
  CHECK(std::abs(wis(with_interval({2.0}, 0.1, 0.9, 0, 1, 0.5)) - 1.2333) < 1e-4);
  CHECK(wis(with_interval({2.0}, 0.1, 0.9, 0, 1, 0.5)) ==
        doctest::Approx(oracle::wis_row(2.0, 0.5, {0.2}, {0}, {1})).epsilon(1e-12));
}

TEST_CASE("WIS with no intervals is the median absolute error") {
  auto p = regression({1, 4, -2}, {0, 0, 0});
  p.levels = {0.5};
  p.quantiles = {{1.5, 3.0, 0.0}};
  const double mae_median = (0.5 + 1.0 + 2.0) / 3.0;
  // (1 / 0.5) * 0.5 |y - m| collapses to |y - m|.
  CHECK(wis(p) == mae_median);
}

TEST_CASE("WIS matches the row oracle with several pairs") {
  Rng rng(4);
  PredictionSet p;
  p.levels = {0.05, 0.25, 0.5, 0.75, 0.95};
  p.quantiles.assign(5, {});
  double expect = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double y = rng.normal(), c = rng.normal(0, 0.5), s = 0.2 + rng.uniform();
    const std::vector<double> q = {c - 1.6 * s, c - 0.7 * s, c, c + 0.7 * s, c + 1.6 * s};
    p.y_true.push_back(y);
    p.y_point.push_back(c);
    for (int k = 0; k < 5; ++k) p.quantiles[k].push_back(q[k]);
    expect += oracle::wis_row(y, c, {0.1, 0.5}, {q[0], q[1]}, {q[4], q[3]});
  }
  CHECK(wis(p) == doctest::Approx(expect / 50).epsilon(1e-12));
  CHECK(symmetric_pairs(p).size() == 2);
  p.levels = {0.05, 0.25, 0.4, 0.75, 0.95};
  CHECK_THROWS_AS(wis(p), Error);
}

TEST_CASE("classification scores") {
  SUBCASE("perfect") {
    const auto s = classification_scores(classification({0, 1, 1}, {{1, 0}, {0, 1}, {0, 1}}));
    CHECK(s.accuracy == 1.0);
    CHECK(s.nll == doctest::Approx(0.0));
    CHECK(s.brier == 0.0);
    CHECK(s.ece == 0.0);
    CHECK(s.macro_f1 == 1.0);
  }
  SUBCASE("coin flips with tie break") {
    const auto s = classification_scores(classification({0, 0}, {{0.5, 0.5}, {0.5, 0.5}}));
    CHECK(s.brier == doctest::Approx(0.5));
    CHECK(s.ece == doctest::Approx(0.5));
    CHECK(s.accuracy == 1.0);
  }
  SUBCASE("confidently wrong") {
    const auto s = classification_scores(classification({0, 1}, {{0, 1}, {1, 0}}));
    CHECK(s.ece == doctest::Approx(1.0));
    CHECK(s.accuracy == 0.0);
    CHECK(s.nll == doctest::Approx(-std::log(1e-12)));
  }
  SUBCASE("rows must sum to one") {
    try {
      classification_scores(classification({0}, {{0.5, 0.6}}));
      FAIL("expected validation error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::validation);
    }
  }
  SUBCASE("bins partition the rows") {
    const auto p = fixture::calibrated_logits(500, 3, 1.5, 1.0, 3);
    const auto s = classification_scores(p, 10);
    std::size_t total = 0;
    for (const auto& b : s.bins) total += b.count;
    CHECK(s.bins.size() == 10);
    CHECK(total == 500);
  }
}

TEST_CASE("conformal calibration") {
  SUBCASE("zero scores leave intervals unchanged") {
    // Every target sits exactly on the upper bound.
    auto cal = with_interval(std::vector<double>(20, 1.0), 0.05, 0.95, -1, 1, 0);
    const auto apply = with_interval({0.3, 5.0}, 0.05, 0.95, -1, 1, 0);
    const auto r = conformal_calibrate(cal, apply, 0.05, 0.95);
    CHECK(r.offset == 0.0);
    CHECK(r.calibrated.quantiles == apply.quantiles);
  }
  SUBCASE("slack intervals shrink") {
    const auto cal = with_interval(std::vector<double>(20, 0.0), 0.05, 0.95, -1, 1, 0);
    const auto r = conformal_calibrate(cal, cal, 0.05, 0.95);
    CHECK(r.offset == -1.0);
  }
  SUBCASE("offset is the expected order statistic") {
    auto cal = fixture::gaussian_intervals(99, 0.05, 0.95, 0.5, 17);
    std::vector<double> scores;
    for (double y : cal.y_true) scores.push_back(std::max(-0.5 - y, y - 0.5));
    std::sort(scores.begin(), scores.end());
    const auto r = conformal_calibrate(cal, cal, 0.05, 0.95);
    // ceil(100 * 0.9) = 90th smallest.
    CHECK(r.offset == scores[89]);
  }
  SUBCASE("known noise reaches nominal coverage") {
    const auto cal = fixture::gaussian_intervals(1000, 0.05, 0.95, 0.3, 5);
    const auto test = fixture::gaussian_intervals(2000, 0.05, 0.95, 0.3, 6);
    const auto r = conformal_calibrate(cal, test, 0.05, 0.95);
    const double cov = interval_metrics(r.calibrated, 0.05, 0.95).coverage;
    CHECK(cov >= 0.87);
    CHECK(cov <= 0.93);
    CHECK(r.offset > 0.0);
  }
  SUBCASE("too few rows") {
    const auto cal = fixture::gaussian_intervals(9, 0.05, 0.95, 0.3, 5);
    try {
      conformal_calibrate(cal, cal, 0.05, 0.95);
      FAIL("expected insufficient calibration");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::insufficient_calibration);
    }
  }
  SUBCASE("rank clamp warns") {
    const auto cal = fixture::gaussian_intervals(10, 0.025, 0.975, 0.3, 5);
    CHECK_FALSE(conformal_calibrate(cal, cal, 0.025, 0.975).warnings.empty());
  }
}

TEST_CASE("temperature scaling") {
  SUBCASE("calibrated source") {
    const auto p = fixture::calibrated_logits(4000, 3, 2.0, 1.0, 31);
    const auto r = temperature_scale(p, p);
    CHECK(r.temperature >= 0.9);
    CHECK(r.temperature <= 1.1);
    CHECK(r.nll_after <= r.nll_before);
  }
  SUBCASE("over-confident by two") {
    const auto p = fixture::calibrated_logits(4000, 3, 2.0, 2.0, 32);
    const auto r = temperature_scale(p, p);
    CHECK(r.temperature == doctest::Approx(2.0).epsilon(0.1));
    CHECK(r.temperature == doctest::Approx(oracle::grid_temperature(p.logits, p.labels)).epsilon(2e-3));
    CHECK(r.nll_after <= r.nll_before);
    CHECK(r.nll_before == doctest::Approx(oracle::nll(p.logits, p.labels, 1.0)).epsilon(1e-9));
    // Calibrated probabilities are softmax(z / T).
    const auto expect = softmax(p.logits[0], r.temperature);
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(r.calibrated.probabilities[0][k] == doctest::Approx(expect[k]).epsilon(1e-12));
    }
  }
  SUBCASE("logits required") {
    auto p = fixture::calibrated_logits(50, 2, 1.0, 1.0, 1);
    p.logits.clear();
    try {
      temperature_scale(p, p);
      FAIL("expected configuration error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::configuration);
    }
  }
}

TEST_CASE("evaluate_predictions flat metric view") {
  auto p = with_interval({0.5, 2.0}, 0.1, 0.9, 0, 1, 0.5);
  p.imputed = {true, false};
  const auto r = evaluate_predictions(p);
  REQUIRE(r.metric("mae"));
  CHECK(r.metric("mae")->orientation == Orientation::lower_better);
  CHECK(r.metric("rmse")->value.value() >= r.metric("mae")->value.value());
  CHECK(r.wis.value() == doctest::Approx(wis(p)));
  CHECK(r.imputed_rows == 1);
  CHECK_FALSE(r.warnings.empty());
  Json j = r;
  CHECK(j.get<UqReport>() == r);
}

TEST_CASE("prediction CSV round trip") {
  TempDir dir("preds");
  auto p = with_interval({0.5, 2.0, 1.0 / 3.0}, 0.1, 0.9, 0, 1, 0.5);
  p.imputed = {false, true, false};
  write_predictions_csv(p, dir.file("p.csv"));
  const auto back = read_predictions_csv(dir.file("p.csv"), "v", "s");
  CHECK(back.y_true == p.y_true);
  CHECK(back.quantiles == p.quantiles);
  CHECK(back.levels == p.levels);
  CHECK(back.imputed == p.imputed);
}
