#include "iarc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "csv_detail.hpp"
#include "iarc/dataset.hpp"
#include "iarc/error.hpp"

namespace iarc {

namespace {

constexpr double kLevelTol = 1e-9;
constexpr double kProbFloor = 1e-12;

void require_task(const PredictionSet& p, Task task, const char* op) {
  if (p.task != task) {
    throw Error(ErrorKind::configuration,
                fmt::format("{}: prediction set '{}' has the wrong task", op, p.slice_name));
  }
}

std::size_t argmax_lowest(const std::vector<double>& row) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < row.size(); ++c) {
    if (row[c] > row[best]) best = c;
  }
  return best;
}

double log_softmax_at(const std::vector<double>& logits, double temperature, std::size_t k) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double z : logits) mx = std::max(mx, z / temperature);
  double acc = 0.0;
  for (double z : logits) acc += std::exp(z / temperature - mx);
  return logits[k] / temperature - mx - std::log(acc);
}

double logit_nll(const PredictionSet& p, double temperature) {
  double total = 0.0;
  for (std::size_t i = 0; i < p.labels.size(); ++i) {
    total -= log_softmax_at(p.logits[i], temperature, static_cast<std::size_t>(p.labels[i]));
  }
  return total / static_cast<double>(p.labels.size());
}

void sort_quantile_rows(PredictionSet& p) {
  std::vector<double> row(p.levels.size());
  for (std::size_t i = 0; i < p.y_true.size(); ++i) {
    for (std::size_t k = 0; k < row.size(); ++k) row[k] = p.quantiles[k][i];
    std::sort(row.begin(), row.end());
    for (std::size_t k = 0; k < row.size(); ++k) p.quantiles[k][i] = row[k];
  }
}

}  // namespace

std::optional<std::size_t> PredictionSet::level_index(double level) const {
  for (std::size_t k = 0; k < levels.size(); ++k) {
    if (std::abs(levels[k] - level) <= kLevelTol) return k;
  }
  return std::nullopt;
}

void PredictionSet::validate() const {
  auto bad = [&](const std::string& why) {
    throw Error(ErrorKind::validation,
                fmt::format("prediction set '{}'/'{}': {}", model_version, slice_name, why));
  };
  const std::size_t n = size();
  if (!imputed.empty() && imputed.size() != n) bad("imputed flags misaligned");
  if (task == Task::regression) {
    if (y_point.size() != n) bad("y_pred length differs from y_true");
    if (quantiles.size() != levels.size()) bad("quantile columns differ from levels");
    for (std::size_t k = 0; k < levels.size(); ++k) {
      if (!(levels[k] > 0.0 && levels[k] < 1.0)) bad("quantile level outside (0, 1)");
      if (k > 0 && !(levels[k] > levels[k - 1])) bad("quantile levels not strictly increasing");
      if (quantiles[k].size() != n) bad("quantile column length differs from y_true");
    }
    return;
  }
  if (probabilities.size() != n) bad("probability rows differ from labels");
  if (!logits.empty() && logits.size() != n) bad("logit rows differ from labels");
  const std::size_t c = class_count();
  for (std::size_t i = 0; i < n; ++i) {
    if (probabilities[i].size() != c || c == 0) bad(fmt::format("row {} has wrong class count", i));
    double sum = 0.0;
    for (double v : probabilities[i]) {
      if (!(v >= 0.0)) bad(fmt::format("row {} has a negative or missing probability", i));
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-6) bad(fmt::format("row {} probabilities sum to {}", i, sum));
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= c) {
      bad(fmt::format("row {} label {} outside [0, {})", i, labels[i], c));
    }
    if (!logits.empty() && logits[i].size() != c) bad(fmt::format("row {} logit count", i));
  }
}

RegressionKpis regression_kpis(const PredictionSet& p) {
  require_task(p, Task::regression, "regression_kpis");
  p.validate();
  if (p.y_true.empty()) throw Error(ErrorKind::validation, "regression_kpis: no rows");
  RegressionKpis k;
  double abs_sum = 0.0, sq_sum = 0.0, ape_sum = 0.0;
  std::size_t ape_n = 0;
  for (std::size_t i = 0; i < p.y_true.size(); ++i) {
    const double e = p.y_point[i] - p.y_true[i];
    abs_sum += std::abs(e);
    sq_sum += e * e;
    if (std::abs(p.y_true[i]) < 1e-12) {
      ++k.mape_skipped;
    } else {
      ape_sum += std::abs(e) / std::abs(p.y_true[i]);
      ++ape_n;
    }
  }
  const double n = static_cast<double>(p.y_true.size());
  k.mae = abs_sum / n;
  k.rmse = std::sqrt(sq_sum / n);
  if (ape_n > 0) k.mape = ape_sum / static_cast<double>(ape_n);
  return k;
}

IntervalMetrics interval_metrics(const PredictionSet& p, double lo, double hi) {
  require_task(p, Task::regression, "interval_metrics");
  const auto ilo = p.level_index(lo);
  const auto ihi = p.level_index(hi);
  if (!ilo || !ihi) {
    throw Error(ErrorKind::configuration,
                fmt::format("prediction set '{}' lacks quantile level {}", p.slice_name,
                            !ilo ? lo : hi));
  }
  IntervalMetrics m;
  m.lo = p.levels[*ilo];
  m.hi = p.levels[*ihi];
  m.nominal = m.hi - m.lo;
  const auto& ql = p.quantiles[*ilo];
  const auto& qh = p.quantiles[*ihi];
  std::size_t covered = 0;
  double width = 0.0;
  for (std::size_t i = 0; i < p.y_true.size(); ++i) {
    if (p.y_true[i] >= ql[i] && p.y_true[i] <= qh[i]) ++covered;
    width += qh[i] - ql[i];
  }
  const double n = static_cast<double>(p.y_true.size());
  m.coverage = n > 0 ? static_cast<double>(covered) / n : 0.0;
  m.mpiw = n > 0 ? width / n : 0.0;
  return m;
}

std::vector<std::pair<double, double>> symmetric_pairs(const PredictionSet& p) {
  std::vector<std::pair<double, double>> pairs;
  for (double l : p.levels) {
    if (l < 0.5 - kLevelTol) {
      if (auto h = p.level_index(1.0 - l)) pairs.emplace_back(l, p.levels[*h]);
    }
  }
  return pairs;
}

double wis(const PredictionSet& p) {
  require_task(p, Task::regression, "wis");
  const auto med = p.level_index(0.5);
  if (!med) {
    throw Error(ErrorKind::configuration,
                fmt::format("WIS needs a median (0.5) column in '{}'", p.slice_name));
  }
  const auto pairs = symmetric_pairs(p);
  const double norm = 1.0 / (static_cast<double>(pairs.size()) + 0.5);
  double total = 0.0;
  for (std::size_t i = 0; i < p.y_true.size(); ++i) {
    const double y = p.y_true[i];
    double row = 0.5 * std::abs(y - p.quantiles[*med][i]);
    for (const auto& [lo, hi] : pairs) {
      const double alpha = 2.0 * lo;
      const double l = p.quantiles[*p.level_index(lo)][i];
      const double u = p.quantiles[*p.level_index(hi)][i];
      double is = u - l;
      if (y < l) is += (2.0 / alpha) * (l - y);
      if (y > u) is += (2.0 / alpha) * (y - u);
      row += 0.5 * alpha * is;
    }
    total += norm * row;
  }
  return p.y_true.empty() ? 0.0 : total / static_cast<double>(p.y_true.size());
}

ClassificationScores classification_scores(const PredictionSet& p, std::size_t bins) {
  require_task(p, Task::classification, "classification_scores");
  p.validate();
  if (bins < 1) throw Error(ErrorKind::configuration, "ECE needs at least one bin");
  const std::size_t n = p.labels.size();
  if (n == 0) throw Error(ErrorKind::validation, "classification_scores: no rows");
  const std::size_t c = p.class_count();

  ClassificationScores s;
  std::vector<std::size_t> tp(c, 0), fp(c, 0), fn(c, 0);
  std::vector<double> conf_sum(bins, 0.0);
  std::vector<std::size_t> hit(bins, 0), count(bins, 0);
  std::size_t correct = 0;
  double nll = 0.0, brier = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = p.probabilities[i];
    const auto y = static_cast<std::size_t>(p.labels[i]);
    const std::size_t pred = argmax_lowest(row);
    const double conf = row[pred];
    const bool ok = pred == y;
    if (ok) {
      ++correct;
      ++tp[y];
    } else {
      ++fp[pred];
      ++fn[y];
    }
    nll -= std::log(std::max(row[y], kProbFloor));
    for (std::size_t k = 0; k < c; ++k) {
      const double d = row[k] - (k == y ? 1.0 : 0.0);
      brier += d * d;
    }
    const auto b = std::min(bins - 1, static_cast<std::size_t>(conf * static_cast<double>(bins)));
    conf_sum[b] += conf;
    count[b] += 1;
    if (ok) hit[b] += 1;
  }
  const double nd = static_cast<double>(n);
  s.accuracy = static_cast<double>(correct) / nd;
  s.nll = nll / nd;
  s.brier = brier / nd;

  double f1_sum = 0.0;
  std::size_t f1_classes = 0;
  for (std::size_t k = 0; k < c; ++k) {
    const std::size_t denom = 2 * tp[k] + fp[k] + fn[k];
    if (denom == 0) continue;
    f1_sum += 2.0 * static_cast<double>(tp[k]) / static_cast<double>(denom);
    ++f1_classes;
  }
  s.macro_f1 = f1_classes ? f1_sum / static_cast<double>(f1_classes) : 0.0;

  for (std::size_t b = 0; b < bins; ++b) {
    ReliabilityBin rb;
    rb.lower = static_cast<double>(b) / static_cast<double>(bins);
    rb.upper = static_cast<double>(b + 1) / static_cast<double>(bins);
    rb.count = count[b];
    if (count[b] > 0) {
      const double cb = static_cast<double>(count[b]);
      rb.mean_confidence = conf_sum[b] / cb;
      rb.accuracy = static_cast<double>(hit[b]) / cb;
      s.ece += (cb / nd) * std::abs(*rb.accuracy - *rb.mean_confidence);
    }
    s.bins.push_back(rb);
  }
  return s;
}

ConformalResult conformal_calibrate(const PredictionSet& p_cal, const PredictionSet& p_apply,
                                    double lo, double hi) {
  require_task(p_cal, Task::regression, "conformal_calibrate");
  require_task(p_apply, Task::regression, "conformal_calibrate");
  const auto cal_lo = p_cal.level_index(lo), cal_hi = p_cal.level_index(hi);
  const auto app_lo = p_apply.level_index(lo), app_hi = p_apply.level_index(hi);
  if (!cal_lo || !cal_hi || !app_lo || !app_hi) {
    throw Error(ErrorKind::configuration,
                fmt::format("conformal calibration needs levels {} and {} in both sets", lo, hi));
  }
  if (!(hi > lo)) throw Error(ErrorKind::configuration, "conformal level pair needs lo < hi");
  const std::size_t n = p_cal.y_true.size();
  if (n < 10) {
    throw Error(ErrorKind::insufficient_calibration,
                fmt::format("conformal calibration needs at least 10 rows, got {}", n));
  }

  ConformalResult result;
  result.calibration_size = n;
  std::vector<double> scores(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double y = p_cal.y_true[i];
    scores[i] = std::max(p_cal.quantiles[*cal_lo][i] - y, y - p_cal.quantiles[*cal_hi][i]);
  }
  std::sort(scores.begin(), scores.end());
  const double alpha = 1.0 - (hi - lo);
  auto rank = static_cast<std::size_t>(
      std::ceil(static_cast<double>(n + 1) * (1.0 - alpha) - 1e-9));
  if (rank > n) {
    result.warnings.push_back(fmt::format(
        "conformal: {} calibration rows are too few for nominal coverage {}; largest score used",
        n, hi - lo));
    rank = n;
  }
  rank = std::max<std::size_t>(rank, 1);
  result.offset = scores[rank - 1];

  result.calibrated = p_apply;
  for (std::size_t i = 0; i < p_apply.y_true.size(); ++i) {
    result.calibrated.quantiles[*app_lo][i] -= result.offset;
    result.calibrated.quantiles[*app_hi][i] += result.offset;
  }
  sort_quantile_rows(result.calibrated);
  return result;
}

std::vector<double> softmax(const std::vector<double>& logits, double temperature) {
  std::vector<double> out(logits.size());
  double mx = -std::numeric_limits<double>::infinity();
  for (double z : logits) mx = std::max(mx, z / temperature);
  double acc = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    out[k] = std::exp(logits[k] / temperature - mx);
    acc += out[k];
  }
  for (double& v : out) v /= acc;
  return out;
}

TemperatureResult temperature_scale(const PredictionSet& p_cal, const PredictionSet& p_apply) {
  require_task(p_cal, Task::classification, "temperature_scale");
  require_task(p_apply, Task::classification, "temperature_scale");
  if (p_cal.logits.empty() || p_apply.logits.empty()) {
    throw Error(ErrorKind::configuration, "temperature scaling needs raw logits");
  }
  if (p_cal.labels.size() < 10) {
    throw Error(ErrorKind::insufficient_calibration,
                fmt::format("temperature scaling needs at least 10 calibration rows, got {}",
                            p_cal.labels.size()));
  }
  p_cal.validate();

  // NLL is convex in 1/T, hence unimodal in T on the search bracket.
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.05, b = 20.0;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = logit_nll(p_cal, x1), f2 = logit_nll(p_cal, x2);
  while (b - a > 1e-4) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = logit_nll(p_cal, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = logit_nll(p_cal, x2);
    }
  }
  TemperatureResult result;
  result.temperature = 0.5 * (a + b);
  result.nll_before = logit_nll(p_cal, 1.0);
  result.nll_after = logit_nll(p_cal, result.temperature);
  if (result.nll_before < result.nll_after) {
    result.temperature = 1.0;
    result.nll_after = result.nll_before;
  }
  result.calibrated = p_apply;
  for (std::size_t i = 0; i < p_apply.logits.size(); ++i) {
    result.calibrated.probabilities[i] = softmax(p_apply.logits[i], result.temperature);
  }
  return result;
}

std::string interval_metric_name(const char* prefix, double lo, double hi) {
  return fmt::format("{}@{}-{}", prefix, format_number(lo), format_number(hi));
}

const MetricValue* UqReport::metric(std::string_view name) const {
  for (const auto& m : metrics) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

UqReport evaluate_predictions(const PredictionSet& p, std::size_t bins) {
  p.validate();
  UqReport r;
  r.task = p.task;
  r.model_version = p.model_version;
  r.slice_name = p.slice_name;
  r.n = p.size();
  r.imputed_rows = static_cast<std::size_t>(std::count(p.imputed.begin(), p.imputed.end(), true));
  if (r.imputed_rows > 0) {
    r.warnings.push_back(fmt::format("{} of {} rows in '{}' were predicted from imputed inputs",
                                     r.imputed_rows, r.n, p.slice_name));
  }
  auto add = [&](std::string name, std::optional<double> v, Orientation o,
                 std::optional<double> target = std::nullopt) {
    r.metrics.push_back({std::move(name), v, o, target});
  };
  if (p.task == Task::regression) {
    r.regression = regression_kpis(p);
    add("mae", r.regression->mae, Orientation::lower_better);
    add("rmse", r.regression->rmse, Orientation::lower_better);
    add("mape", r.regression->mape, Orientation::lower_better);
    if (r.regression->mape_skipped > 0) {
      r.warnings.push_back(fmt::format("mape skipped {} near-zero targets in '{}'",
                                       r.regression->mape_skipped, p.slice_name));
    }
    for (const auto& [lo, hi] : symmetric_pairs(p)) {
      const auto im = interval_metrics(p, lo, hi);
      r.intervals.push_back(im);
      add(interval_metric_name("coverage", lo, hi), im.coverage, Orientation::target, im.nominal);
      add(interval_metric_name("mpiw", lo, hi), im.mpiw, Orientation::lower_better);
    }
    if (p.level_index(0.5)) {
      r.wis = wis(p);
      add("wis", r.wis, Orientation::lower_better);
    }
  } else {
    r.classification = classification_scores(p, bins);
    const auto& c = *r.classification;
    add("accuracy", c.accuracy, Orientation::higher_better);
    add("macro_f1", c.macro_f1, Orientation::higher_better);
    add("nll", c.nll, Orientation::lower_better);
    add("brier", c.brier, Orientation::lower_better);
    add("ece", c.ece, Orientation::lower_better);
  }
  return r;
}

PredictionSet read_predictions_csv(const std::string& path, std::string model_version,
                                   std::string slice_name) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open predictions file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::parse, path + ": missing header row");
  const auto header = detail::split_csv_line(line);

  PredictionSet p;
  p.model_version = std::move(model_version);
  p.slice_name = std::move(slice_name);
  std::optional<std::size_t> y_col, pred_col, imputed_col;
  std::vector<std::pair<double, std::size_t>> q_cols;
  std::vector<std::pair<int, std::size_t>> p_cols, logit_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string& h = header[c];
    if (h == "y_true") {
      y_col = c;
    } else if (h == "y_pred") {
      pred_col = c;
    } else if (h == "imputed") {
      imputed_col = c;
    } else if (h.rfind("q_", 0) == 0) {
      const auto level = detail::parse_double(std::string_view(h).substr(2));
      if (!level) throw Error(ErrorKind::parse, fmt::format("{}: bad quantile column '{}'", path, h));
      q_cols.emplace_back(*level, c);
    } else if (h.rfind("p_", 0) == 0 || h.rfind("logit_", 0) == 0) {
      const bool is_p = h[0] == 'p';
      const auto idx = detail::parse_double(std::string_view(h).substr(is_p ? 2 : 6));
      if (!idx || *idx < 0 || *idx != std::floor(*idx)) {
        throw Error(ErrorKind::parse, fmt::format("{}: bad class column '{}'", path, h));
      }
      (is_p ? p_cols : logit_cols).emplace_back(static_cast<int>(*idx), c);
    }
  }
  if (!y_col) throw Error(ErrorKind::configuration, path + ": no y_true column");
  p.task = p_cols.empty() ? Task::regression : Task::classification;
  if (p.task == Task::regression && !pred_col) {
    throw Error(ErrorKind::configuration, path + ": regression predictions need y_pred");
  }
  std::sort(q_cols.begin(), q_cols.end());
  std::sort(p_cols.begin(), p_cols.end());
  std::sort(logit_cols.begin(), logit_cols.end());
  for (std::size_t k = 0; k < p_cols.size(); ++k) {
    if (p_cols[k].first != static_cast<int>(k)) {
      throw Error(ErrorKind::parse, path + ": probability columns must be p_0..p_{C-1}");
    }
  }
  if (!logit_cols.empty() && logit_cols.size() != p_cols.size()) {
    throw Error(ErrorKind::parse, path + ": logit columns must match probability columns");
  }
  for (const auto& [level, c] : q_cols) p.levels.push_back(level);
  p.quantiles.resize(q_cols.size());

  std::size_t line_no = 1;
  auto number = [&](const std::vector<std::string>& fields, std::size_t c) {
    const auto v = detail::parse_double(fields[c]);
    if (!v) {
      throw Error(ErrorKind::parse, fmt::format("{}: row {}, column '{}': malformed number '{}'",
                                                path, line_no, header[c], fields[c]));
    }
    return *v;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorKind::parse, fmt::format("{}: row {} has {} fields, header has {}", path,
                                                line_no, fields.size(), header.size()));
    }
    if (p.task == Task::regression) {
      p.y_true.push_back(number(fields, *y_col));
      p.y_point.push_back(number(fields, *pred_col));
      for (std::size_t k = 0; k < q_cols.size(); ++k) {
        p.quantiles[k].push_back(number(fields, q_cols[k].second));
      }
    } else {
      const double label = number(fields, *y_col);
      if (label != std::floor(label)) {
        throw Error(ErrorKind::parse, fmt::format("{}: row {}: non-integer label", path, line_no));
      }
      p.labels.push_back(static_cast<int>(label));
      p.y_true.push_back(label);
      std::vector<double> probs, logits;
      for (const auto& [k, c] : p_cols) probs.push_back(number(fields, c));
      for (const auto& [k, c] : logit_cols) logits.push_back(number(fields, c));
      p.probabilities.push_back(std::move(probs));
      if (!logit_cols.empty()) p.logits.push_back(std::move(logits));
    }
    if (imputed_col) p.imputed.push_back(number(fields, *imputed_col) != 0.0);
  }
  p.validate();
  return p;
}

void write_predictions_csv(const PredictionSet& p, const std::string& path) {
  std::ostringstream out;
  const bool with_imputed = !p.imputed.empty();
  out << "y_true";
  if (p.task == Task::regression) {
    out << ",y_pred";
    for (double l : p.levels) out << ",q_" << format_number(l);
  } else {
    for (std::size_t k = 0; k < p.class_count(); ++k) out << ",p_" << k;
    if (!p.logits.empty()) {
      for (std::size_t k = 0; k < p.class_count(); ++k) out << ",logit_" << k;
    }
  }
  if (with_imputed) out << ",imputed";
  out << '\n';
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.task == Task::regression) {
      out << format_number(p.y_true[i]) << ',' << format_number(p.y_point[i]);
      for (const auto& q : p.quantiles) out << ',' << format_number(q[i]);
    } else {
      out << p.labels[i];
      for (double v : p.probabilities[i]) out << ',' << format_number(v);
      if (!p.logits.empty()) {
        for (double v : p.logits[i]) out << ',' << format_number(v);
      }
    }
    if (with_imputed) out << ',' << (p.imputed[i] ? 1 : 0);
    out << '\n';
  }
  write_text_file(path, out.str());
}

void to_json(Json& j, const MetricValue& v) {
  j = Json{{"name", v.name}, {"value", v.value}, {"orientation", v.orientation}};
  if (v.target) j["target"] = *v.target;
}

void from_json(const Json& j, MetricValue& v) {
  j.at("name").get_to(v.name);
  j.at("value").get_to(v.value);
  j.at("orientation").get_to(v.orientation);
  v.target = j.contains("target") ? std::optional<double>(j.at("target").get<double>())
                                  : std::nullopt;
}

namespace {

Json bins_json(const std::vector<ReliabilityBin>& bins) {
  Json out = Json::array();
  for (const auto& b : bins) {
    out.push_back(Json{{"lower", b.lower},
                       {"upper", b.upper},
                       {"count", b.count},
                       {"mean_confidence", b.mean_confidence},
                       {"accuracy", b.accuracy}});
  }
  return out;
}

}  // namespace

void to_json(Json& j, const UqReport& v) {
  j = Json{{"task", v.task},         {"model_version", v.model_version},
           {"slice_name", v.slice_name}, {"n", v.n},
           {"imputed_rows", v.imputed_rows}, {"metrics", v.metrics},
           {"warnings", v.warnings}};
  if (v.regression) {
    j["mape_skipped"] = v.regression->mape_skipped;
    Json intervals = Json::array();
    for (const auto& im : v.intervals) {
      intervals.push_back(Json{{"lo", im.lo},
                               {"hi", im.hi},
                               {"nominal", im.nominal},
                               {"coverage", im.coverage},
                               {"mpiw", im.mpiw}});
    }
    j["intervals"] = intervals;
  }
  if (v.classification) j["reliability_bins"] = bins_json(v.classification->bins);
}

void from_json(const Json& j, UqReport& v) {
  j.at("task").get_to(v.task);
  j.at("model_version").get_to(v.model_version);
  j.at("slice_name").get_to(v.slice_name);
  j.at("n").get_to(v.n);
  j.at("imputed_rows").get_to(v.imputed_rows);
  j.at("metrics").get_to(v.metrics);
  j.at("warnings").get_to(v.warnings);
  auto metric = [&](const char* name) -> std::optional<double> {
    const auto* m = v.metric(name);
    return m ? m->value : std::nullopt;
  };
  v.regression.reset();
  v.classification.reset();
  v.intervals.clear();
  v.wis.reset();
  if (v.task == Task::regression) {
    RegressionKpis k;
    k.mae = metric("mae").value_or(0.0);
    k.rmse = metric("rmse").value_or(0.0);
    k.mape = metric("mape");
    k.mape_skipped = j.value("mape_skipped", std::size_t{0});
    v.regression = k;
    for (const auto& ji : j.value("intervals", Json::array())) {
      IntervalMetrics im;
      ji.at("lo").get_to(im.lo);
      ji.at("hi").get_to(im.hi);
      ji.at("nominal").get_to(im.nominal);
      ji.at("coverage").get_to(im.coverage);
      ji.at("mpiw").get_to(im.mpiw);
      v.intervals.push_back(im);
    }
    v.wis = metric("wis");
  } else {
    ClassificationScores c;
    c.accuracy = metric("accuracy").value_or(0.0);
    c.macro_f1 = metric("macro_f1").value_or(0.0);
    c.nll = metric("nll").value_or(0.0);
    c.brier = metric("brier").value_or(0.0);
    c.ece = metric("ece").value_or(0.0);
    for (const auto& jb : j.value("reliability_bins", Json::array())) {
      ReliabilityBin b;
      jb.at("lower").get_to(b.lower);
      jb.at("upper").get_to(b.upper);
      jb.at("count").get_to(b.count);
      jb.at("mean_confidence").get_to(b.mean_confidence);
      jb.at("accuracy").get_to(b.accuracy);
      c.bins.push_back(b);
    }
    v.classification = c;
  }
}

}  // namespace iarc
