#include "iarc/dataset.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "iarc/error.hpp"
#include "iarc/hashing.hpp"
#include "csv_detail.hpp"

namespace iarc {

namespace detail {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        current.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back(trim(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.emplace_back(trim(current));
  return fields;
}

bool is_missing_token(std::string_view s) {
  return s.empty() || s == "NaN" || s == "nan" || s == "NAN";
}

std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace detail

namespace {

using detail::is_missing_token;
using detail::parse_double;
using detail::split_csv_line;
using detail::trim;

bool parse_int(std::string_view s, int& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string format_number(double v) {
  if (is_missing(v)) return {};
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::optional<double> parse_timestamp(std::string_view text) {
  text = trim(text);
  if (auto v = parse_double(text)) return v;
  // YYYY-MM-DD
  if (text.size() < 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int year = 0, month = 0, day = 0;
  if (!parse_int(text.substr(0, 4), year) || !parse_int(text.substr(5, 2), month) ||
      !parse_int(text.substr(8, 2), day)) {
    return std::nullopt;
  }
  const std::chrono::year_month_day ymd{std::chrono::year{year},
                                        std::chrono::month{static_cast<unsigned>(month)},
                                        std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok()) return std::nullopt;
  double seconds = static_cast<double>(
      std::chrono::sys_days{ymd}.time_since_epoch().count()) * 86400.0;
  std::string_view rest = text.substr(10);
  if (rest.empty()) return seconds;
  if (rest.front() != 'T' && rest.front() != ' ') return std::nullopt;
  rest.remove_prefix(1);
  int hh = 0, mm = 0;
  if (rest.size() < 5 || rest[2] != ':' || !parse_int(rest.substr(0, 2), hh) ||
      !parse_int(rest.substr(3, 2), mm) || hh > 23 || mm > 59) {
    return std::nullopt;
  }
  seconds += hh * 3600.0 + mm * 60.0;
  rest.remove_prefix(5);
  if (!rest.empty() && rest.front() == ':') {
    std::size_t end = 1;
    while (end < rest.size() && (std::isdigit(static_cast<unsigned char>(rest[end])) ||
                                 rest[end] == '.')) {
      ++end;
    }
    const auto sec = parse_double(rest.substr(1, end - 1));
    if (!sec || *sec < 0.0 || *sec >= 61.0) return std::nullopt;
    seconds += *sec;
    rest.remove_prefix(end);
  }
  if (rest.empty() || rest == "Z") return seconds;
  if ((rest.front() == '+' || rest.front() == '-') && rest.size() == 6 && rest[3] == ':') {
    int oh = 0, om = 0;
    if (!parse_int(rest.substr(1, 2), oh) || !parse_int(rest.substr(4, 2), om)) {
      return std::nullopt;
    }
    const double offset = oh * 3600.0 + om * 60.0;
    return rest.front() == '+' ? seconds - offset : seconds + offset;
  }
  return std::nullopt;
}

TimeSeriesDataset TimeSeriesDataset::create(std::string name,
                                            std::vector<std::string> feature_names,
                                            std::vector<double> timestamps,
                                            std::vector<double> values,
                                            std::optional<std::vector<std::string>> batch_ids,
                                            Json provenance) {
  const std::size_t n = timestamps.size();
  const std::size_t p = feature_names.size();
  if (values.size() != n * p) {
    throw Error(ErrorKind::validation,
                fmt::format("dataset '{}': {} cells for {} rows x {} features", name,
                            values.size(), n, p));
  }
  if (batch_ids && batch_ids->size() != n) {
    throw Error(ErrorKind::validation,
                fmt::format("dataset '{}': {} batch ids for {} rows", name, batch_ids->size(), n));
  }
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i + 1; j < p; ++j) {
      if (feature_names[i] == feature_names[j]) {
        throw Error(ErrorKind::validation,
                    fmt::format("dataset '{}': duplicate feature '{}'", name, feature_names[i]));
      }
    }
  }
  for (double t : timestamps) {
    if (!std::isfinite(t)) {
      throw Error(ErrorKind::validation, fmt::format("dataset '{}': non-finite timestamp", name));
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (batch_ids && (*batch_ids)[a] != (*batch_ids)[b]) return (*batch_ids)[a] < (*batch_ids)[b];
    return timestamps[a] < timestamps[b];
  });

  TimeSeriesDataset ds;
  ds.name_ = std::move(name);
  ds.features_ = std::move(feature_names);
  ds.provenance_ = std::move(provenance);
  ds.timestamps_.resize(n);
  ds.values_.resize(n * p);
  if (batch_ids) ds.batch_ids_.emplace(n);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t src = order[r];
    ds.timestamps_[r] = timestamps[src];
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(src * p), p,
                ds.values_.begin() + static_cast<std::ptrdiff_t>(r * p));
    if (batch_ids) (*ds.batch_ids_)[r] = std::move((*batch_ids)[src]);
  }
  // Missing cells canonicalize to one NaN bit pattern.
  for (double& v : ds.values_) {
    if (is_missing(v)) v = kMissing;
  }
  ds.version_ = "sha256:" + sha256_hex(canonical_bytes(ds));
  return ds;
}

std::vector<double> TimeSeriesDataset::column(std::size_t col) const {
  std::vector<double> out(rows());
  for (std::size_t r = 0; r < rows(); ++r) out[r] = at(r, col);
  return out;
}

std::vector<double> TimeSeriesDataset::column(std::string_view feature) const {
  return column(feature_index(feature));
}

std::optional<std::size_t> TimeSeriesDataset::find_feature(std::string_view feature) const {
  const auto it = std::find(features_.begin(), features_.end(), feature);
  if (it == features_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - features_.begin());
}

std::size_t TimeSeriesDataset::feature_index(std::string_view feature) const {
  if (auto idx = find_feature(feature)) return *idx;
  throw Error(ErrorKind::configuration,
              fmt::format("dataset '{}' has no feature '{}'", name_, feature));
}

std::vector<std::string> TimeSeriesDataset::batches() const {
  std::vector<std::string> out;
  if (!batch_ids_) return out;
  for (const auto& b : *batch_ids_) {
    if (out.empty() || out.back() != b) out.push_back(b);
  }
  return out;
}

TimeSeriesDataset TimeSeriesDataset::select_rows(std::span<const std::size_t> indices,
                                                 std::string name) const {
  std::vector<double> ts;
  std::vector<double> vals;
  std::optional<std::vector<std::string>> batches;
  ts.reserve(indices.size());
  vals.reserve(indices.size() * cols());
  if (batch_ids_) batches.emplace();
  for (std::size_t idx : indices) {
    if (idx >= rows()) {
      throw Error(ErrorKind::validation, fmt::format("row index {} out of range", idx));
    }
    ts.push_back(timestamps_[idx]);
    const auto r = row(idx);
    vals.insert(vals.end(), r.begin(), r.end());
    if (batch_ids_) batches->push_back((*batch_ids_)[idx]);
  }
  return create(std::move(name), features_, std::move(ts), std::move(vals), std::move(batches),
                provenance_);
}

TimeSeriesDataset TimeSeriesDataset::select_features(std::span<const std::string> features) const {
  std::vector<std::size_t> idx;
  for (const auto& f : features) idx.push_back(feature_index(f));
  std::vector<double> vals;
  vals.reserve(rows() * idx.size());
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t c : idx) vals.push_back(at(r, c));
  }
  return create(name_, std::vector<std::string>(features.begin(), features.end()), timestamps_,
                std::move(vals), batch_ids_, provenance_);
}

TimeSeriesDataset TimeSeriesDataset::with_values(std::vector<double> values, std::string name,
                                                 Json provenance) const {
  return create(std::move(name), features_, timestamps_, std::move(values), batch_ids_,
                std::move(provenance));
}

std::string canonical_bytes(const TimeSeriesDataset& ds) {
  std::string out = "timestamp";
  if (ds.batch_ids()) out += ",batch";
  for (const auto& f : ds.feature_names()) {
    out.push_back(',');
    out += csv_escape(f);
  }
  out.push_back('\n');
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    out += format_number(ds.timestamps()[r]);
    if (ds.batch_ids()) {
      out.push_back(',');
      out += csv_escape((*ds.batch_ids())[r]);
    }
    for (double v : ds.row(r)) {
      out.push_back(',');
      out += format_number(v);
    }
    out.push_back('\n');
  }
  return out;
}

TimeSeriesDataset load_csv(const std::string& path, const CsvColumns& columns, std::string name) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open CSV file: " + path);
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorKind::parse, path + ": missing header row");
  }
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split_csv_line(line);

  std::optional<std::size_t> ts_col;
  std::optional<std::size_t> batch_col;
  std::vector<std::size_t> feature_cols;
  std::vector<std::string> feature_names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == columns.timestamp) {
      ts_col = c;
    } else if (columns.batch && header[c] == *columns.batch) {
      batch_col = c;
    } else if (std::find(columns.ignore.begin(), columns.ignore.end(), header[c]) ==
               columns.ignore.end()) {
      feature_cols.push_back(c);
      feature_names.push_back(header[c]);
    }
  }
  if (!ts_col) {
    throw Error(ErrorKind::configuration,
                fmt::format("{}: timestamp column '{}' not found in header", path,
                            columns.timestamp));
  }
  if (columns.batch && !batch_col) {
    throw Error(ErrorKind::configuration,
                fmt::format("{}: batch column '{}' not found in header", path, *columns.batch));
  }

  std::vector<double> timestamps;
  std::vector<double> values;
  std::optional<std::vector<std::string>> batches;
  if (batch_col) batches.emplace();
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorKind::parse, fmt::format("{}: row {} has {} fields, header has {}", path,
                                                line_no, fields.size(), header.size()));
    }
    const auto ts = parse_timestamp(fields[*ts_col]);
    if (!ts) {
      throw Error(ErrorKind::parse, fmt::format("{}: row {}, column '{}': bad timestamp '{}'",
                                                path, line_no, header[*ts_col], fields[*ts_col]));
    }
    timestamps.push_back(*ts);
    if (batch_col) batches->push_back(fields[*batch_col]);
    for (std::size_t k = 0; k < feature_cols.size(); ++k) {
      const std::string& cell = fields[feature_cols[k]];
      if (is_missing_token(cell)) {
        values.push_back(kMissing);
        continue;
      }
      const auto v = parse_double(cell);
      if (!v) {
        throw Error(ErrorKind::parse, fmt::format("{}: row {}, column '{}': malformed number '{}'",
                                                  path, line_no, feature_names[k], cell));
      }
      values.push_back(*v);
    }
  }
  if (timestamps.empty()) throw Error(ErrorKind::empty_dataset, path + ": no data rows");
  if (name.empty()) {
    const auto slash = path.find_last_of('/');
    name = path.substr(slash == std::string::npos ? 0 : slash + 1);
    if (const auto dot = name.rfind('.'); dot != std::string::npos && dot > 0) name.resize(dot);
  }
  return TimeSeriesDataset::create(std::move(name), std::move(feature_names),
                                   std::move(timestamps), std::move(values), std::move(batches));
}

void write_csv(const TimeSeriesDataset& ds, const std::string& path, const CsvColumns& columns) {
  std::ostringstream out;
  out << csv_escape(columns.timestamp);
  const bool with_batch = ds.batch_ids().has_value();
  const std::string batch_name = columns.batch.value_or("batch");
  if (with_batch) out << ',' << csv_escape(batch_name);
  for (const auto& f : ds.feature_names()) out << ',' << csv_escape(f);
  out << '\n';
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    out << format_number(ds.timestamps()[r]);
    if (with_batch) out << ',' << csv_escape((*ds.batch_ids())[r]);
    for (double v : ds.row(r)) out << ',' << format_number(v);
    out << '\n';
  }
  write_text_file(path, out.str());
}

std::string utc_now_iso8601() {
  const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  const auto days = std::chrono::floor<std::chrono::days>(now);
  const std::chrono::year_month_day ymd{days};
  const std::chrono::hh_mm_ss hms{now - days};
  return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                     hms.hours().count(), hms.minutes().count(), hms.seconds().count());
}

RunStamp make_run_stamp(std::uint64_t seed, std::string code_version, std::string created_at) {
  RunStamp stamp;
  stamp.seed = seed;
  stamp.code_version = std::move(code_version);
  stamp.tool_version = IARC_TOOL_VERSION;
  stamp.created_at = std::move(created_at);
#if defined(__clang__)
  stamp.environment["compiler"] = fmt::format("clang {}.{}.{}", __clang_major__,
                                              __clang_minor__, __clang_patchlevel__);
#elif defined(__GNUC__)
  stamp.environment["compiler"] = fmt::format("gcc {}.{}.{}", __GNUC__, __GNUC_MINOR__,
                                              __GNUC_PATCHLEVEL__);
#else
  stamp.environment["compiler"] = "unknown";
#endif
  stamp.environment["cxx_standard"] = static_cast<std::int64_t>(__cplusplus);
  stamp.environment["eigen"] = fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION,
                                           EIGEN_MINOR_VERSION);
  stamp.environment["nlohmann_json"] =
      fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR, NLOHMANN_JSON_VERSION_MINOR,
                  NLOHMANN_JSON_VERSION_PATCH);
  stamp.environment["fmt"] = FMT_VERSION;
  return stamp;
}

void to_json(Json& j, const RunStamp& s) {
  j = Json{{"seed", s.seed},
           {"code_version", s.code_version},
           {"tool_version", s.tool_version},
           {"created_at", s.created_at},
           {"environment", s.environment}};
}

void from_json(const Json& j, RunStamp& s) {
  j.at("seed").get_to(s.seed);
  j.at("code_version").get_to(s.code_version);
  j.at("tool_version").get_to(s.tool_version);
  j.at("created_at").get_to(s.created_at);
  s.environment = j.value("environment", Json::object());
}

}  // namespace iarc
