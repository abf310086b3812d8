#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "iarc/json_util.hpp"
#include "iarc/stats.hpp"

namespace iarc {

/// Immutable matrix of sensor channels over time. Rows are kept sorted by
/// (batch_id, timestamp) with a stable sort; missing cells are NaN.
class TimeSeriesDataset {
 public:
  TimeSeriesDataset() = default;

  /// Validates shapes, sorts rows, and computes dataset_version.
  /// `values` is row-major with feature_names.size() columns.
  static TimeSeriesDataset create(std::string name, std::vector<std::string> feature_names,
                                  std::vector<double> timestamps, std::vector<double> values,
                                  std::optional<std::vector<std::string>> batch_ids = std::nullopt,
                                  Json provenance = nullptr);

  const std::string& name() const noexcept { return name_; }
  const std::string& dataset_version() const noexcept { return version_; }
  const std::vector<std::string>& feature_names() const noexcept { return features_; }
  const std::vector<double>& timestamps() const noexcept { return timestamps_; }
  const std::optional<std::vector<std::string>>& batch_ids() const noexcept { return batch_ids_; }
  const Json& provenance() const noexcept { return provenance_; }

  std::size_t rows() const noexcept { return timestamps_.size(); }
  std::size_t cols() const noexcept { return features_.size(); }
  bool empty() const noexcept { return timestamps_.empty(); }

  double at(std::size_t row, std::size_t col) const { return values_[row * cols() + col]; }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols(), cols()};
  }
  std::span<const double> values() const noexcept { return values_; }
  std::vector<double> column(std::size_t col) const;
  std::vector<double> column(std::string_view feature) const;

  std::optional<std::size_t> find_feature(std::string_view feature) const;
  /// Throws a configuration error for unknown names.
  std::size_t feature_index(std::string_view feature) const;

  /// Distinct batch ids in row order.
  std::vector<std::string> batches() const;

  /// Rows at `indices` (any order; result is re-sorted canonically).
  TimeSeriesDataset select_rows(std::span<const std::size_t> indices, std::string name) const;
  /// Keeps only the listed features, in the listed order.
  TimeSeriesDataset select_features(std::span<const std::string> features) const;
  /// Same rows and columns, new cell values.
  TimeSeriesDataset with_values(std::vector<double> values, std::string name, Json provenance) const;

 private:
  std::string name_;
  std::string version_;
  std::vector<std::string> features_;
  std::vector<double> timestamps_;
  std::vector<double> values_;
  std::optional<std::vector<std::string>> batch_ids_;
  Json provenance_;
};

/// Bytes hashed into dataset_version: header line, then one line per row
/// (timestamp, batch, cells), shortest round-trip numbers, missing as empty.
std::string canonical_bytes(const TimeSeriesDataset& ds);

/// Shortest round-trip decimal rendering.
std::string format_number(double v);

/// Column roles for CSV ingestion. Every column that is neither the timestamp
/// nor the batch column, nor listed in `ignore`, becomes a feature.
struct CsvColumns {
  std::string timestamp = "timestamp";
  std::optional<std::string> batch;
  std::vector<std::string> ignore;
};

TimeSeriesDataset load_csv(const std::string& path, const CsvColumns& columns,
                           std::string name = {});
/// Inverse of load_csv for the same CsvColumns (timestamps written as seconds).
void write_csv(const TimeSeriesDataset& ds, const std::string& path, const CsvColumns& columns);

/// Float seconds or ISO-8601 (YYYY-MM-DD[T ]hh:mm[:ss[.fff]][Z|+hh:mm]) to
/// seconds since the Unix epoch.
std::optional<double> parse_timestamp(std::string_view text);

/// Reproducibility identifiers stored alongside every reported result.
struct RunStamp {
  std::uint64_t seed = 0;
  std::string code_version;
  std::string tool_version;
  std::string created_at;
  Json environment = Json::object();

  bool operator==(const RunStamp&) const = default;
};

/// tool_version and environment (compiler, library versions) filled in.
RunStamp make_run_stamp(std::uint64_t seed, std::string code_version, std::string created_at);
std::string utc_now_iso8601();

void to_json(Json& j, const RunStamp& s);
void from_json(const Json& j, RunStamp& s);

}  // namespace iarc
