#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "iarc/dataset.hpp"
#include "iarc/json_util.hpp"

namespace iarc {

enum class SplitMode { chronological, group };

inline constexpr std::array<const char*, 4> kSplitNames = {"train", "validation", "calibration",
                                                           "test"};

struct SplitConfig {
  /// train, validation, calibration, test; non-negative, summing to 1 within 1e-9.
  std::array<double, 4> fractions = {0.6, 0.1, 0.15, 0.15};
  std::size_t purge_gap = 0;  // rows
  SplitMode mode = SplitMode::chronological;
  std::uint64_t seed = 0;     // group mode only

  /// Throws ErrorKind::configuration on bad fractions.
  void validate() const;
  bool operator==(const SplitConfig&) const = default;
};

struct SplitAssignment {
  /// Row indices per split, in kSplitNames order, each ascending.
  std::array<std::vector<std::size_t>, 4> parts;
  std::vector<std::size_t> purged;

  const std::vector<std::size_t>& train() const { return parts[0]; }
  const std::vector<std::size_t>& validation() const { return parts[1]; }
  const std::vector<std::size_t>& calibration() const { return parts[2]; }
  const std::vector<std::size_t>& test() const { return parts[3]; }

  bool operator==(const SplitAssignment&) const = default;
};

/// Boundaries at floor(cumulative fraction * n); each non-empty split after
/// the first loses its first purge_gap rows to the purged list.
SplitAssignment chronological_split(const TimeSeriesDataset& ds, const SplitConfig& cfg);

/// Batches are shuffled with cfg.seed, stably ordered by size (largest first),
/// then poured into the splits in order until each split's row share is met.
SplitAssignment group_split(const TimeSeriesDataset& ds, const SplitConfig& cfg);

/// Dispatches on cfg.mode.
SplitAssignment make_split(const TimeSeriesDataset& ds, const SplitConfig& cfg);

struct SplitViolation {
  std::string kind;  // out_of_range | overlap | coverage | order | purge | group_overlap
  std::string message;
  std::vector<std::size_t> indices;

  bool operator==(const SplitViolation&) const = default;
};

struct SplitValidation {
  bool passed = true;
  std::vector<SplitViolation> violations;
};

SplitValidation validate_splits(const TimeSeriesDataset& ds, const SplitAssignment& sa,
                                const SplitConfig& cfg);

NLOHMANN_JSON_SERIALIZE_ENUM(SplitMode, {{SplitMode::chronological, "chronological"},
                                         {SplitMode::group, "group"}})

void to_json(Json& j, const SplitConfig& v);
void from_json(const Json& j, SplitConfig& v);
void to_json(Json& j, const SplitAssignment& v);
void from_json(const Json& j, SplitAssignment& v);
void to_json(Json& j, const SplitViolation& v);

}  // namespace iarc
