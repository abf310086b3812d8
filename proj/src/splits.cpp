#include "iarc/splits.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "iarc/error.hpp"
#include "iarc/rng.hpp"

namespace iarc {

void SplitConfig::validate() const {
  double sum = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    if (!(fractions[k] >= 0.0) || fractions[k] > 1.0) {
      throw Error(ErrorKind::configuration,
                  fmt::format("split fraction '{}' = {} outside [0, 1]", kSplitNames[k],
                              fractions[k]));
    }
    sum += fractions[k];
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorKind::configuration,
                fmt::format("split fractions sum to {}, expected 1", sum));
  }
}

SplitAssignment chronological_split(const TimeSeriesDataset& ds, const SplitConfig& cfg) {
  cfg.validate();
  if (cfg.mode != SplitMode::chronological) {
    throw Error(ErrorKind::configuration, "chronological_split called with a group config");
  }
  const auto& ts = ds.timestamps();
  for (std::size_t r = 1; r < ts.size(); ++r) {
    if (ts[r] < ts[r - 1]) {
      throw Error(ErrorKind::configuration,
                  fmt::format("rows are not globally time-ordered (row {}); use group mode", r));
    }
  }
  const std::size_t n = ds.rows();
  std::array<std::size_t, 5> bounds{};
  double cumulative = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    cumulative += cfg.fractions[k];
    // The epsilon absorbs representation error such as 0.29 * 100 = 28.999...
    bounds[k + 1] = std::min(n, static_cast<std::size_t>(
                                    std::floor(cumulative * static_cast<double>(n) + 1e-9)));
    bounds[k + 1] = std::max(bounds[k + 1], bounds[k]);
  }
  bounds[4] = n;

  SplitAssignment sa;
  bool seen_non_empty = false;
  for (std::size_t k = 0; k < 4; ++k) {
    std::size_t begin = bounds[k];
    const std::size_t end = bounds[k + 1];
    if (begin == end) {
      if (cfg.fractions[k] > 0.0) {
        throw Error(ErrorKind::infeasible_split,
                    fmt::format("split '{}' (fraction {}) receives no rows out of {}",
                                kSplitNames[k], cfg.fractions[k], n));
      }
      continue;
    }
    if (seen_non_empty) {
      const std::size_t purge_end = std::min(end, begin + cfg.purge_gap);
      for (std::size_t r = begin; r < purge_end; ++r) sa.purged.push_back(r);
      begin = purge_end;
      if (begin == end) {
        throw Error(ErrorKind::infeasible_split,
                    fmt::format("purge gap {} empties split '{}'", cfg.purge_gap,
                                kSplitNames[k]));
      }
    }
    seen_non_empty = true;
    sa.parts[k].resize(end - begin);
    std::iota(sa.parts[k].begin(), sa.parts[k].end(), begin);
  }
  return sa;
}

SplitAssignment group_split(const TimeSeriesDataset& ds, const SplitConfig& cfg) {
  cfg.validate();
  if (cfg.mode != SplitMode::group) {
    throw Error(ErrorKind::configuration, "group_split called with a chronological config");
  }
  if (!ds.batch_ids()) {
    throw Error(ErrorKind::configuration,
                fmt::format("group split needs batch ids; dataset '{}' has none", ds.name()));
  }
  const auto& ids = *ds.batch_ids();
  std::map<std::string, std::vector<std::size_t>> rows_of;
  for (std::size_t r = 0; r < ids.size(); ++r) rows_of[ids[r]].push_back(r);

  std::vector<std::string> batches;
  for (const auto& [name, rows] : rows_of) batches.push_back(name);
  Rng rng(cfg.seed);
  for (std::size_t i = batches.size(); i > 1; --i) {
    std::swap(batches[i - 1], batches[rng.index(i)]);
  }
  std::stable_sort(batches.begin(), batches.end(), [&](const auto& a, const auto& b) {
    return rows_of[a].size() > rows_of[b].size();
  });

  std::vector<std::size_t> active;
  for (std::size_t k = 0; k < 4; ++k) {
    if (cfg.fractions[k] > 0.0) active.push_back(k);
  }
  if (batches.size() < active.size()) {
    throw Error(ErrorKind::infeasible_split,
                fmt::format("{} batches cannot fill {} non-empty splits", batches.size(),
                            active.size()));
  }

  SplitAssignment sa;
  const double n = static_cast<double>(ds.rows());
  std::size_t next = 0;
  for (std::size_t a = 0; a < active.size(); ++a) {
    const std::size_t k = active[a];
    const bool last = a + 1 == active.size();
    const std::size_t reserve = active.size() - a - 1;
    const double target = cfg.fractions[k] * n;
    std::size_t taken_rows = 0;
    while (next < batches.size()) {
      if (!last) {
        if (taken_rows > 0 && static_cast<double>(taken_rows) >= target) break;
        if (taken_rows > 0 && batches.size() - next <= reserve) break;
      }
      const auto& rows = rows_of[batches[next]];
      sa.parts[k].insert(sa.parts[k].end(), rows.begin(), rows.end());
      taken_rows += rows.size();
      ++next;
    }
    std::sort(sa.parts[k].begin(), sa.parts[k].end());
  }
  return sa;
}

SplitAssignment make_split(const TimeSeriesDataset& ds, const SplitConfig& cfg) {
  return cfg.mode == SplitMode::chronological ? chronological_split(ds, cfg)
                                              : group_split(ds, cfg);
}

SplitValidation validate_splits(const TimeSeriesDataset& ds, const SplitAssignment& sa,
                                const SplitConfig& cfg) {
  SplitValidation result;
  auto fail = [&](std::string kind, std::string message, std::vector<std::size_t> indices) {
    result.passed = false;
    result.violations.push_back({std::move(kind), std::move(message), std::move(indices)});
  };

  const std::size_t n = ds.rows();
  // Owner of each row: 0..3 for splits, 4 for purged.
  std::vector<int> owner(n, -1);
  std::vector<std::size_t> out_of_range;
  std::map<std::pair<int, int>, std::vector<std::size_t>> overlaps;
  auto claim = [&](const std::vector<std::size_t>& rows, int who) {
    for (std::size_t r : rows) {
      if (r >= n) {
        out_of_range.push_back(r);
        continue;
      }
      if (owner[r] != -1 && owner[r] != who) {
        overlaps[{owner[r], who}].push_back(r);
      } else if (owner[r] == who) {
        overlaps[{who, who}].push_back(r);
      }
      owner[r] = who;
    }
  };
  for (int k = 0; k < 4; ++k) claim(sa.parts[k], k);
  claim(sa.purged, 4);

  auto label = [](int who) -> std::string { return who == 4 ? "purged" : kSplitNames[who]; };
  if (!out_of_range.empty()) {
    fail("out_of_range", fmt::format("{} indices outside [0, {})", out_of_range.size(), n),
         out_of_range);
  }
  for (auto& [pair, rows] : overlaps) {
    fail("overlap",
         pair.first == pair.second
             ? fmt::format("duplicate indices within '{}'", label(pair.first))
             : fmt::format("indices in both '{}' and '{}'", label(pair.first), label(pair.second)),
         rows);
  }
  std::vector<std::size_t> unassigned;
  for (std::size_t r = 0; r < n; ++r) {
    if (owner[r] == -1) unassigned.push_back(r);
  }
  if (!unassigned.empty()) {
    fail("coverage", fmt::format("{} rows belong to no split", unassigned.size()), unassigned);
  }

  if (cfg.mode == SplitMode::chronological) {
    std::set<std::size_t> purged(sa.purged.begin(), sa.purged.end());
    int prev = -1;
    for (int k = 0; k < 4; ++k) {
      if (sa.parts[k].empty()) continue;
      if (prev >= 0) {
        const auto prev_max = *std::max_element(sa.parts[prev].begin(), sa.parts[prev].end());
        const auto cur_min = *std::min_element(sa.parts[k].begin(), sa.parts[k].end());
        if (prev_max >= cur_min) {
          std::vector<std::size_t> offending;
          for (std::size_t r : sa.parts[k]) {
            if (r <= prev_max) offending.push_back(r);
          }
          fail("order",
               fmt::format("'{}' index {} is not before '{}' index {}", kSplitNames[prev],
                           prev_max, kSplitNames[k], cur_min),
               offending);
        } else {
          const std::size_t gap = cur_min - prev_max - 1;
          std::vector<std::size_t> not_purged;
          for (std::size_t r = prev_max + 1; r < cur_min; ++r) {
            if (!purged.count(r)) not_purged.push_back(r);
          }
          if (gap < cfg.purge_gap || !not_purged.empty()) {
            std::vector<std::size_t> boundary = {prev_max, cur_min};
            boundary.insert(boundary.end(), not_purged.begin(), not_purged.end());
            fail("purge",
                 fmt::format("gap of {} purged rows between '{}' and '{}', purge_gap is {}",
                             gap - not_purged.size(), kSplitNames[prev], kSplitNames[k],
                             cfg.purge_gap),
                 boundary);
          }
        }
      }
      prev = k;
    }
  } else {
    if (!ds.batch_ids()) {
      fail("group_overlap", "group assignment on a dataset without batch ids", {});
    } else {
      const auto& ids = *ds.batch_ids();
      std::map<std::string, std::set<int>> splits_of;
      std::map<std::string, std::vector<std::size_t>> rows_of;
      for (int k = 0; k < 4; ++k) {
        for (std::size_t r : sa.parts[k]) {
          if (r >= n) continue;
          splits_of[ids[r]].insert(k);
          rows_of[ids[r]].push_back(r);
        }
      }
      for (const auto& [batch, ks] : splits_of) {
        if (ks.size() > 1) {
          fail("group_overlap", fmt::format("batch '{}' appears in {} splits", batch, ks.size()),
               rows_of[batch]);
        }
      }
    }
    if (!sa.purged.empty()) {
      fail("purge", "group mode must not purge rows", sa.purged);
    }
  }
  return result;
}

void to_json(Json& j, const SplitConfig& v) {
  Json fractions = Json::object();
  for (std::size_t k = 0; k < 4; ++k) fractions[kSplitNames[k]] = v.fractions[k];
  j = Json{{"fractions", fractions},
           {"purge_gap", v.purge_gap},
           {"mode", v.mode},
           {"seed", v.seed}};
}

void from_json(const Json& j, SplitConfig& v) {
  const auto& fractions = j.at("fractions");
  for (std::size_t k = 0; k < 4; ++k) v.fractions[k] = fractions.value(kSplitNames[k], 0.0);
  v.purge_gap = j.value("purge_gap", std::size_t{0});
  v.mode = j.value("mode", SplitMode::chronological);
  v.seed = j.value("seed", std::uint64_t{0});
}

void to_json(Json& j, const SplitAssignment& v) {
  j = Json::object();
  for (std::size_t k = 0; k < 4; ++k) j[kSplitNames[k]] = v.parts[k];
  j["purged"] = v.purged;
}

void from_json(const Json& j, SplitAssignment& v) {
  for (std::size_t k = 0; k < 4; ++k) j.at(kSplitNames[k]).get_to(v.parts[k]);
  j.at("purged").get_to(v.purged);
}

void to_json(Json& j, const SplitViolation& v) {
  j = Json{{"kind", v.kind}, {"message", v.message}, {"indices", v.indices}};
}

}  // namespace iarc
