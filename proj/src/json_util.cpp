#include "iarc/json_util.hpp"

#include <fstream>
#include <sstream>

#include "iarc/error.hpp"

namespace iarc {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse: return "parse error";
    case ErrorKind::configuration: return "configuration error";
    case ErrorKind::empty_dataset: return "empty dataset";
    case ErrorKind::validation: return "validation error";
    case ErrorKind::infeasible_split: return "infeasible split";
    case ErrorKind::undefined_statistic: return "undefined statistic";
    case ErrorKind::insufficient_calibration: return "insufficient calibration data";
    case ErrorKind::singular_system: return "singular system";
    case ErrorKind::empty_scenario: return "empty scenario";
    case ErrorKind::comparison: return "comparison error";
    case ErrorKind::io: return "i/o error";
  }
  return "error";
}

std::string canonical_dump(const Json& j) { return j.dump(2) + "\n"; }

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Json read_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::parse, path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write file: " + path);
  out << text;
  if (!out) throw Error(ErrorKind::io, "write failed: " + path);
}

}  // namespace iarc
