#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "json.hpp"

namespace nlohmann {

// 3.11 has no built-in std::optional support; missing values map to null.
template <typename T>
struct adl_serializer<std::optional<T>> {
  static void to_json(json& j, const std::optional<T>& opt) {
    if (opt) {
      j = *opt;
    } else {
      j = nullptr;
    }
  }
  static void from_json(const json& j, std::optional<T>& opt) {
    if (j.is_null()) {
      opt = std::nullopt;
    } else {
      opt = j.get<T>();
    }
  }
};

}  // namespace nlohmann

namespace iarc {

using Json = nlohmann::json;

/// Finite doubles pass through; NaN/inf become null so the output stays valid JSON.
inline Json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

/// Canonical text: sorted keys (std::map), shortest round-trip numbers,
/// two-space indent, trailing newline.
std::string canonical_dump(const Json& j);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace iarc
