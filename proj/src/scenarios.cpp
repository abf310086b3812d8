#include "iarc/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "iarc/error.hpp"
#include "iarc/rng.hpp"
#include "iarc/stats.hpp"

namespace iarc {

std::string to_string(FaultType fault) {
  const Json j = fault;
  return j.get<std::string>();
}

void ScenarioSpec::validate() const {
  if (name.empty()) throw Error(ErrorKind::validation, "scenario without a name");
  if (kind == ScenarioKind::real_slice) {
    if (batch_id.has_value() == time_range.has_value()) {
      throw Error(ErrorKind::validation,
                  fmt::format("real slice '{}' needs exactly one of batch_id or time_range",
                              name));
    }
    if (time_range && !(time_range->first <= time_range->second)) {
      throw Error(ErrorKind::validation,
                  fmt::format("real slice '{}' has an empty time range", name));
    }
    return;
  }
  if (!(severity > 0.0 && severity <= 1.0)) {
    throw Error(ErrorKind::validation,
                fmt::format("scenario '{}': severity {} outside (0, 1]", name, severity));
  }
  if (features.empty()) {
    throw Error(ErrorKind::validation,
                fmt::format("scenario '{}': synthetic fault without target features", name));
  }
}

std::string ScenarioSpec::family() const {
  if (kind == ScenarioKind::real_slice) return "real_slice";
  auto sorted = features;
  std::sort(sorted.begin(), sorted.end());
  return fmt::format("{}[{}]", to_string(fault), fmt::join(sorted, ","));
}

const ScenarioSpec* ScenarioCatalog::find(std::string_view name) const {
  for (const auto& s : scenarios) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

namespace {

ScenarioSpec parse_spec_base(const Json& js) {
  ScenarioSpec spec;
  try {
    js.at("name").get_to(spec.name);
    spec.kind = js.value("kind", ScenarioKind::synthetic_fault);
    if (js.contains("kind") && Json(spec.kind) != js.at("kind")) {
      throw Error(ErrorKind::validation, fmt::format("scenario '{}': unknown kind {}", spec.name,
                                                     js.at("kind").dump()));
    }
    if (js.contains("batch_id")) spec.batch_id = js.at("batch_id").get<std::string>();
    if (js.contains("time_range")) {
      const auto& tr = js.at("time_range");
      if (!tr.is_array() || tr.size() != 2) {
        throw Error(ErrorKind::validation,
                    fmt::format("scenario '{}': time_range must be [start, end]", spec.name));
      }
      spec.time_range = std::make_pair(tr[0].get<double>(), tr[1].get<double>());
    }
    if (spec.kind == ScenarioKind::synthetic_fault) {
      if (!js.contains("fault")) {
        throw Error(ErrorKind::validation,
                    fmt::format("scenario '{}': synthetic fault without 'fault'", spec.name));
      }
      const auto& jf = js.at("fault");
      spec.fault = jf.get<FaultType>();
      if (Json(spec.fault) != jf) {
        throw Error(ErrorKind::validation, fmt::format("scenario '{}': unknown fault {}",
                                                       spec.name, jf.dump()));
      }
      spec.features = js.value("features", std::vector<std::string>{});
    }
    spec.seed = js.value("seed", std::uint64_t{0});
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::validation, fmt::format("bad scenario entry {}: {}", js.dump(), e.what()));
  }
  return spec;
}

}  // namespace

ScenarioCatalog build_catalog(const Json& config) {
  ScenarioCatalog catalog;
  if (!config.is_object()) throw Error(ErrorKind::validation, "catalog config must be an object");
  catalog.base_split = config.value("base_split", std::string("test"));
  if (config.contains("anchors")) catalog.anchors = config.at("anchors").get<FaultAnchors>();
  const Json scenarios = config.value("scenarios", Json::array());
  if (!scenarios.is_array() || scenarios.empty()) {
    throw Error(ErrorKind::validation, "scenario catalog is empty");
  }
  for (const auto& js : scenarios) {
    ScenarioSpec base = parse_spec_base(js);
    if (base.kind == ScenarioKind::synthetic_fault && js.contains("severities")) {
      const auto severities = js.at("severities").get<std::vector<double>>();
      if (severities.empty()) {
        throw Error(ErrorKind::validation,
                    fmt::format("scenario '{}': empty severities list", base.name));
      }
      for (double s : severities) {
        ScenarioSpec spec = base;
        spec.severity = s;
        spec.name = fmt::format("{}@{}", base.name, format_number(s));
        catalog.scenarios.push_back(std::move(spec));
      }
    } else {
      if (base.kind == ScenarioKind::synthetic_fault) {
        if (!js.contains("severity")) {
          throw Error(ErrorKind::validation,
                      fmt::format("scenario '{}': needs severity or severities", base.name));
        }
        base.severity = js.at("severity").get<double>();
      }
      catalog.scenarios.push_back(std::move(base));
    }
  }
  std::set<std::string> seen;
  for (const auto& spec : catalog.scenarios) {
    spec.validate();
    if (!seen.insert(spec.name).second) {
      throw Error(ErrorKind::validation,
                  fmt::format("duplicate scenario name '{}' in catalog", spec.name));
    }
  }
  return catalog;
}

ScenarioCatalog load_catalog(const std::string& path) { return build_catalog(read_json_file(path)); }

TimeSeriesDataset apply_fault(const TimeSeriesDataset& ds, const ScenarioSpec& spec,
                              const std::map<std::string, double>& train_std,
                              const FaultAnchors& anchors) {
  if (spec.kind != ScenarioKind::synthetic_fault) {
    throw Error(ErrorKind::validation,
                fmt::format("apply_fault called on real slice '{}'", spec.name));
  }
  spec.validate();
  std::vector<std::size_t> cols;
  for (const auto& f : spec.features) {
    const auto c = ds.find_feature(f);
    if (!c) {
      throw Error(ErrorKind::validation,
                  fmt::format("scenario '{}': unknown feature '{}'", spec.name, f));
    }
    cols.push_back(*c);
  }

  std::vector<double> values(ds.values().begin(), ds.values().end());
  const std::size_t L = ds.rows();
  const std::size_t p = ds.cols();
  const double s = spec.severity;
  for (std::size_t k = 0; k < cols.size(); ++k) {
    const std::size_t c = cols[k];
    const std::string& feature = spec.features[k];
    double sigma = 0.0;
    if (auto it = train_std.find(feature); it != train_std.end()) {
      sigma = it->second;
    } else {
      sigma = sample_std(drop_missing(ds.column(c)));
    }
    Rng rng(derive_seed(spec.seed, "fault/" + feature));
    auto cell = [&](std::size_t r) -> double& { return values[r * p + c]; };

    switch (spec.fault) {
      case FaultType::gaussian_noise: {
        const double sd = anchors.noise_sigma * s * sigma;
        for (std::size_t r = 0; r < L; ++r) {
          const double e = rng.normal();
          if (!is_missing(cell(r))) cell(r) += sd * e;
        }
        break;
      }
      case FaultType::drift_ramp: {
        const double end = anchors.ramp_sigma * s * sigma;
        for (std::size_t r = 0; r < L && L > 1; ++r) {
          if (!is_missing(cell(r))) {
            cell(r) += end * static_cast<double>(r) / static_cast<double>(L - 1);
          }
        }
        break;
      }
      case FaultType::stuck_at: {
        auto len = static_cast<std::size_t>(
            std::ceil(s * static_cast<double>(L) * anchors.stuck_fraction));
        len = std::clamp<std::size_t>(len, 1, L);
        const std::size_t start = rng.index(L - len + 1);
        const double held = cell(start);
        for (std::size_t r = start; r < start + len; ++r) cell(r) = held;
        break;
      }
      case FaultType::spike: {
        const double rate = anchors.spike_rate * s;
        const double amplitude = anchors.spike_sigma * sigma;
        for (std::size_t r = 0; r < L; ++r) {
          const bool hit = rng.bernoulli(rate);
          const double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
          if (hit && !is_missing(cell(r))) cell(r) += sign * amplitude;
        }
        break;
      }
      case FaultType::dropout: {
        const double rate = anchors.dropout_rate * s;
        for (std::size_t r = 0; r < L; ++r) {
          if (rng.bernoulli(rate)) cell(r) = kMissing;
        }
        break;
      }
    }
  }
  Json provenance = Json{{"scenario", spec},
                         {"base_dataset_version", ds.dataset_version()},
                         {"anchors", anchors}};
  return ds.with_values(std::move(values), spec.name, std::move(provenance));
}

TimeSeriesDataset slice_scenario(const TimeSeriesDataset& ds, const ScenarioSpec& spec) {
  if (spec.kind != ScenarioKind::real_slice) {
    throw Error(ErrorKind::validation,
                fmt::format("slice_scenario called on synthetic fault '{}'", spec.name));
  }
  spec.validate();
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    bool keep = false;
    if (spec.batch_id) {
      keep = ds.batch_ids() && (*ds.batch_ids())[r] == *spec.batch_id;
    } else {
      const double t = ds.timestamps()[r];
      keep = t >= spec.time_range->first && t <= spec.time_range->second;
    }
    if (keep) rows.push_back(r);
  }
  if (rows.empty()) {
    throw Error(ErrorKind::empty_scenario,
                fmt::format("real slice '{}' selects no rows of '{}'", spec.name, ds.name()));
  }
  auto out = ds.select_rows(rows, spec.name);
  Json provenance = Json{{"scenario", spec}, {"base_dataset_version", ds.dataset_version()}};
  return out.with_values(std::vector<double>(out.values().begin(), out.values().end()),
                         spec.name, std::move(provenance));
}

TimeSeriesDataset materialize_scenario(const TimeSeriesDataset& ds, const ScenarioSpec& spec,
                                       const std::map<std::string, double>& train_std,
                                       const FaultAnchors& anchors) {
  if (spec.kind == ScenarioKind::real_slice) return slice_scenario(ds, spec);
  return apply_fault(ds, spec, train_std, anchors);
}

void to_json(Json& j, const FaultAnchors& v) {
  j = Json{{"noise_sigma", v.noise_sigma},   {"ramp_sigma", v.ramp_sigma},
           {"spike_sigma", v.spike_sigma},   {"spike_rate", v.spike_rate},
           {"dropout_rate", v.dropout_rate}, {"stuck_fraction", v.stuck_fraction}};
}

void from_json(const Json& j, FaultAnchors& v) {
  const FaultAnchors d;
  v.noise_sigma = j.value("noise_sigma", d.noise_sigma);
  v.ramp_sigma = j.value("ramp_sigma", d.ramp_sigma);
  v.spike_sigma = j.value("spike_sigma", d.spike_sigma);
  v.spike_rate = j.value("spike_rate", d.spike_rate);
  v.dropout_rate = j.value("dropout_rate", d.dropout_rate);
  v.stuck_fraction = j.value("stuck_fraction", d.stuck_fraction);
}

void to_json(Json& j, const ScenarioSpec& v) {
  j = Json{{"name", v.name}, {"kind", v.kind}, {"seed", v.seed}};
  if (v.kind == ScenarioKind::real_slice) {
    if (v.batch_id) j["batch_id"] = *v.batch_id;
    if (v.time_range) j["time_range"] = {v.time_range->first, v.time_range->second};
  } else {
    j["fault"] = v.fault;
    j["severity"] = v.severity;
    j["features"] = v.features;
  }
}

void to_json(Json& j, const ScenarioCatalog& v) {
  j = Json{{"base_split", v.base_split}, {"anchors", v.anchors}, {"scenarios", v.scenarios}};
}

void from_json(const Json& j, ScenarioCatalog& v) { v = build_catalog(j); }

}  // namespace iarc
