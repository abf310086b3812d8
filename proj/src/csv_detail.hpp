#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace iarc::detail {

/// RFC 4180 style field split (quotes, doubled quotes); fields are trimmed.
std::vector<std::string> split_csv_line(std::string_view line);
/// Finite decimal number or nothing.
std::optional<double> parse_double(std::string_view s);
bool is_missing_token(std::string_view s);

}  // namespace iarc::detail
