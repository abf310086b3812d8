#include "iarc/schema_check.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "iarc/error.hpp"

namespace iarc {

namespace {

const std::set<std::string> kSupported = {
    "type",     "enum",     "required",  "properties", "additionalProperties", "items",
    "minimum",  "maximum",  "minLength", "minItems",   "$ref",
    // annotations
    "$schema",  "$id",      "$defs",     "title",      "description"};

void check_keywords(const Json& schema, const std::string& where) {
  if (schema.is_boolean()) return;
  if (!schema.is_object()) {
    throw Error(ErrorKind::configuration, fmt::format("schema at {} is not an object", where));
  }
  for (const auto& [key, sub] : schema.items()) {
    if (!kSupported.count(key)) {
      throw Error(ErrorKind::configuration,
                  fmt::format("unsupported schema keyword '{}' at {}", key, where));
    }
    if (key == "properties" || key == "$defs") {
      for (const auto& [name, s] : sub.items()) check_keywords(s, where + "/" + key + "/" + name);
    } else if (key == "items" || (key == "additionalProperties" && sub.is_object())) {
      check_keywords(sub, where + "/" + key);
    }
  }
}

bool matches_type(const std::string& type, const Json& v) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "null") return v.is_null();
  if (type == "number") return v.is_number();
  if (type == "integer") {
    if (v.is_number_integer()) return true;
    if (v.is_number_float()) {
      const double d = v.get<double>();
      return std::isfinite(d) && std::floor(d) == d;
    }
    return false;
  }
  return false;
}

std::size_t utf8_length(const std::string& s) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char c) { return (c & 0xC0) != 0x80; }));
}

}  // namespace

std::string pointer_escape(const std::string& token) {
  std::string out;
  for (char c : token) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

SchemaValidator::SchemaValidator(Json schema) : root_(std::move(schema)) {
  check_keywords(root_, "#");
}

const Json& SchemaValidator::resolve(const std::string& ref) const {
  if (ref.rfind("#", 0) != 0) {
    throw Error(ErrorKind::configuration, fmt::format("only local $ref supported, got '{}'", ref));
  }
  try {
    return root_.at(Json::json_pointer(ref.substr(1)));
  } catch (const Json::exception&) {
    throw Error(ErrorKind::configuration, fmt::format("unresolvable $ref '{}'", ref));
  }
}

std::vector<SchemaViolation> SchemaValidator::validate(const Json& instance) const {
  std::vector<SchemaViolation> out;
  check(root_, instance, "", out);
  return out;
}

void SchemaValidator::check(const Json& schema, const Json& v, const std::string& ptr,
                            std::vector<SchemaViolation>& out) const {
  const std::string where = ptr.empty() ? "/" : ptr;
  if (schema.is_boolean()) {
    if (!schema.get<bool>()) out.push_back({where, "no value is allowed here"});
    return;
  }
  if (auto it = schema.find("$ref"); it != schema.end()) {
    check(resolve(it->get<std::string>()), v, ptr, out);
  }
  if (auto it = schema.find("type"); it != schema.end()) {
    bool ok = false;
    if (it->is_string()) {
      ok = matches_type(it->get<std::string>(), v);
    } else {
      for (const auto& t : *it) ok = ok || matches_type(t.get<std::string>(), v);
    }
    if (!ok) {
      out.push_back({where, fmt::format("expected type {}, got {}", it->dump(), v.type_name())});
      return;
    }
  }
  if (auto it = schema.find("enum"); it != schema.end()) {
    if (std::find(it->begin(), it->end(), v) == it->end()) {
      out.push_back({where, fmt::format("value {} not in {}", v.dump(), it->dump())});
    }
  }
  if (v.is_number()) {
    const double d = v.get<double>();
    if (auto it = schema.find("minimum"); it != schema.end() && d < it->get<double>()) {
      out.push_back({where, fmt::format("{} is below the minimum {}", v.dump(), it->dump())});
    }
    if (auto it = schema.find("maximum"); it != schema.end() && d > it->get<double>()) {
      out.push_back({where, fmt::format("{} is above the maximum {}", v.dump(), it->dump())});
    }
  }
  if (v.is_string()) {
    if (auto it = schema.find("minLength");
        it != schema.end() && utf8_length(v.get_ref<const std::string&>()) < it->get<std::size_t>()) {
      out.push_back({where, fmt::format("string shorter than {}", it->dump())});
    }
  }
  if (v.is_array()) {
    if (auto it = schema.find("minItems"); it != schema.end() && v.size() < it->get<std::size_t>()) {
      out.push_back({where, fmt::format("fewer than {} items", it->dump())});
    }
    if (auto it = schema.find("items"); it != schema.end()) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        check(*it, v[i], fmt::format("{}/{}", ptr, i), out);
      }
    }
  }
  if (v.is_object()) {
    if (auto it = schema.find("required"); it != schema.end()) {
      for (const auto& key : *it) {
        const auto& k = key.get_ref<const std::string&>();
        if (!v.contains(k)) {
          out.push_back({ptr + "/" + pointer_escape(k), "required field is missing"});
        }
      }
    }
    const auto props = schema.find("properties");
    const auto extra = schema.find("additionalProperties");
    for (const auto& [key, sub] : v.items()) {
      const std::string child = ptr + "/" + pointer_escape(key);
      if (props != schema.end() && props->contains(key)) {
        check((*props)[key], sub, child, out);
      } else if (extra != schema.end()) {
        if (extra->is_boolean()) {
          if (!extra->get<bool>()) out.push_back({child, "unexpected field"});
        } else {
          check(*extra, sub, child, out);
        }
      }
    }
  }
}

}  // namespace iarc
