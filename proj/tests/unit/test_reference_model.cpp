#include <doctest.h>

#include <cmath>

#include "../common/oracles.hpp"
#include "iarc/error.hpp"
#include "iarc/reference_model.hpp"
#include "iarc/rng.hpp"
#include "iarc/splits.hpp"

using namespace iarc;

namespace {

SyntheticProcessConfig small(std::uint64_t seed, double noise = 0.3) {
  SyntheticProcessConfig cfg;
  cfg.batch_count = 6;
  cfg.steps_per_batch = 60;
  cfg.seed = seed;
  cfg.noise_std = noise;
  return cfg;
}

TimeSeriesDataset subset(const TimeSeriesDataset& ds, const std::vector<std::size_t>& rows,
                         const std::string& name) {
  return ds.select_rows(rows, name);
}

}  // namespace

TEST_CASE("ridge interpolates the identity design") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd y(2);
  y << 2, 3;
  const auto m = fit_ridge(x, y, 0.0);
  for (int i = 0; i < 2; ++i) {
    const std::vector<double> row = {x(i, 0), x(i, 1)};
    CHECK(m.predict(row) == doctest::Approx(y(i)).epsilon(1e-12));
  }
}

TEST_CASE("huge lambda shrinks to the mean") {
  Rng rng(1);
  Eigen::MatrixXd x(30, 3);
  Eigen::VectorXd y(30);
  for (int i = 0; i < 30; ++i) {
    for (int j = 0; j < 3; ++j) x(i, j) = rng.normal();
    y(i) = 2 * x(i, 0) - x(i, 2) + rng.normal(0, 0.1);
  }
  const auto m = fit_ridge(x, y, 1e12);
  for (double w : m.weights) CHECK(std::abs(w) < 1e-6);
  const std::vector<double> probe = {0.3, -1.0, 2.0};
  CHECK(m.predict(probe) == doctest::Approx(y.mean()).epsilon(1e-6));
}

TEST_CASE("constant design predicts the mean") {
  Eigen::MatrixXd x(2, 1);
  x << 1, 1;
  Eigen::VectorXd y(2);
  y << 1, 3;
  const auto m = fit_ridge(x, y, 0.0);
  for (double probe : {-5.0, 1.0, 100.0}) CHECK(m.predict(std::span(&probe, 1)) == 2.0);
}

TEST_CASE("collinear columns at lambda zero are singular") {
  Eigen::MatrixXd x(10, 2);
  for (int i = 0; i < 10; ++i) {
    x(i, 0) = i;
    x(i, 1) = 2.0 * i + 1.0;
  }
  const Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(10, 0, 1);
  try {
    fit_ridge(x, y, 0.0);
    FAIL("expected singular system");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::singular_system);
    CHECK(std::string(e.what()).find("lambda") != std::string::npos);
  }
  CHECK_NOTHROW(fit_ridge(x, y, 0.1));
}

TEST_CASE("ridge matches the Gauss-Jordan normal-equations oracle") {
  Rng rng(77);
  for (int t = 0; t < 20; ++t) {
    const std::size_t p = 1 + rng.index(10), n = p + 2 + rng.index(40);
    const double lambda = t % 3 == 0 ? 0.0 : std::pow(10.0, -3.0 + 5.0 * rng.uniform());
    oracle::Matrix xo(n, std::vector<double>(p));
    std::vector<double> yo(n);
    Eigen::MatrixXd x(n, p);
    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < p; ++j) x(i, j) = xo[i][j] = rng.normal(j, 1.0 + j);
      y(i) = yo[i] = rng.normal(5, 3);
    }
    const auto fit = fit_ridge(x, y, lambda);
    const auto ref = oracle::ridge(xo, yo, lambda);
    for (std::size_t j = 0; j < p; ++j) CHECK(oracle::rel_err(fit.weights[j], ref.weights[j]) < 1e-8);
    CHECK(oracle::rel_err(fit.intercept, ref.intercept) < 1e-8);
  }
}

TEST_CASE("prediction is affine") {
  Rng rng(5);
  Eigen::MatrixXd x(40, 4);
  Eigen::VectorXd y(40);
  for (int i = 0; i < 40; ++i) {
    for (int j = 0; j < 4; ++j) x(i, j) = rng.normal();
    y(i) = rng.normal();
  }
  const auto m = fit_ridge(x, y, 0.5);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> a(4), b(4), mix(4);
    const double alpha = rng.normal();
    for (int j = 0; j < 4; ++j) {
      a[j] = rng.normal();
      b[j] = rng.normal();
      mix[j] = alpha * a[j] + (1 - alpha) * b[j];
    }
    CHECK(m.predict(mix) ==
          doctest::Approx(alpha * m.predict(a) + (1 - alpha) * m.predict(b)).epsilon(1e-12));
  }
}

TEST_CASE("ridge model JSON round trip") {
  Eigen::MatrixXd x(5, 2);
  x << 1, 2, 2, 1, 3, 5, 4, 4, 5, 0;
  Eigen::VectorXd y(5);
  y << 1, 2, 3, 4, 5;
  const auto m = fit_ridge(x, y, 0.1, {"u", "v"});
  Json j = m;
  const auto back = j.get<RidgeModel>();
  CHECK(back.weights == m.weights);
  CHECK(back.features == std::vector<std::string>{"u", "v"});
  CHECK(back.intercept == m.intercept);
}

TEST_CASE("surrogate generator") {
  SUBCASE("deterministic per seed") {
    const auto a = generate_surrogate(small(3)), b = generate_surrogate(small(3));
    CHECK(a.dataset_version() == b.dataset_version());
    CHECK(a.dataset_version() != generate_surrogate(small(4)).dataset_version());
    CHECK(a.batches().size() == 6);
    CHECK(a.rows() == 360);
  }
  SUBCASE("noiseless target equals the formula") {
    const auto cfg = small(9, 0.0);
    const auto ds = generate_surrogate(cfg);
    const auto feed = ds.column("feed_rate"), temp = ds.column("temperature");
    const auto titer = ds.column(kSurrogateTarget);
    double cum = 0.0;
    for (std::size_t r = 0; r < ds.rows(); ++r) {
      if (r % cfg.steps_per_batch == 0) cum = 0.0;
      cum += feed[r] * cfg.step_hours;
      const double g = std::exp(-0.5 * std::pow((temp[r] - 298.0) / 3.0, 2));
      CHECK(titer[r] == doctest::Approx(80.0 * (1 - std::exp(-0.002 * cum)) * g).epsilon(1e-12));
    }
  }
  SUBCASE("constant temperature gives a monotone target") {
    auto cfg = small(10, 0.0);
    cfg.constant_temperature = true;
    const auto ds = generate_surrogate(cfg);
    const auto titer = ds.column(kSurrogateTarget);
    const auto& ids = *ds.batch_ids();
    for (std::size_t r = 1; r < ds.rows(); ++r) {
      if (ids[r] == ids[r - 1]) CHECK(titer[r] >= titer[r - 1]);
    }
  }
  SUBCASE("target is never negative") {
    auto cfg = small(11, 5.0);
    for (double v : generate_surrogate(cfg).column(kSurrogateTarget)) CHECK(v >= 0.0);
  }
  SUBCASE("invalid config") {
    auto cfg = small(1);
    cfg.steps_per_batch = 9;
    CHECK_THROWS_AS(generate_surrogate(cfg), Error);
  }
}

TEST_CASE("soft sensor on the surrogate") {
  SyntheticProcessConfig cfg;
  cfg.batch_count = 12;
  cfg.steps_per_batch = 120;
  cfg.seed = 42;
  const auto ds = generate_surrogate(cfg);
  SplitConfig sc;
  sc.mode = SplitMode::group;
  sc.fractions = {0.5, 0.0, 0.25, 0.25};
  sc.seed = 1;
  const auto sa = group_split(ds, sc);
  const auto train = subset(ds, sa.train(), "train");
  const auto cal = subset(ds, sa.calibration(), "calibration");
  const auto test = subset(ds, sa.test(), "test");

  const auto sensor = fit_soft_sensor(train, {}, 0.0);
  CHECK(sensor.model.features.back() == "cumulative_feed");
  CHECK(sensor.model.trained_on == train.dataset_version());

  const auto pts = predict_points(sensor, test);
  double mae = 0.0;
  for (std::size_t i = 0; i < pts.y_true.size(); ++i) mae += std::abs(pts.y_true[i] - pts.y_point[i]);
  mae /= static_cast<double>(pts.y_true.size());
  CHECK(mae < 0.1 * sample_std(test.column(kSurrogateTarget)));

  const auto iv = predict_with_intervals(sensor, test, cal, {0.05, 0.5, 0.95}, "1.0.0", "test");
  CHECK(iv.conformal_offsets.size() == 1);
  CHECK(iv.predictions.levels == std::vector<double>{0.05, 0.5, 0.95});
  for (std::size_t i = 0; i < iv.predictions.size(); ++i) {
    CHECK(iv.predictions.quantiles[0][i] <= iv.predictions.quantiles[1][i]);
    CHECK(iv.predictions.quantiles[1][i] <= iv.predictions.quantiles[2][i]);
  }
  const double cov = interval_metrics(iv.predictions, 0.05, 0.95).coverage;
  CHECK(cov > 0.8);

  CHECK_THROWS_AS(predict_with_intervals(sensor, test, test, {0.05, 0.5, 0.95}, "v", "t"), Error);
}

TEST_CASE("all-missing row is imputed and flagged") {
  std::vector<double> ts = {0, 3600, 7200, 10800};
  std::vector<double> values = {1.0, 298.0, 6.5, 30.0, 1.0,       //
                                kMissing, kMissing, kMissing, kMissing, 2.0,  //
                                1.2, 298.1, 6.4, 31.0, 3.0,       //
                                1.1, 297.9, 6.6, 29.0, 4.0};
  auto names = kSurrogateFeatures;
  names.emplace_back(kSurrogateTarget);
  const auto ds = TimeSeriesDataset::create("m", names, ts, values,
                                            std::vector<std::string>(4, "B0"));
  const auto sensor = fit_soft_sensor(ds, {}, 1.0);
  const auto pts = predict_points(sensor, ds);
  REQUIRE(pts.imputed.size() == 4);
  CHECK(pts.imputed == std::vector<bool>{false, true, false, false});
  CHECK(std::isfinite(pts.y_point[1]));

  const std::vector<double> means(4, 0.0);
  const auto d = build_design(ds, {}, means);
  // Carried forward from the previous row.
  CHECK(d.x(1, 0) == 1.0);
  CHECK(d.x(1, 1) == 298.0);
}
