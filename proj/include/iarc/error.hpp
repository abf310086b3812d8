#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace iarc {

enum class ErrorKind {
  parse,
  configuration,
  empty_dataset,
  validation,
  infeasible_split,
  undefined_statistic,
  insufficient_calibration,
  singular_system,
  empty_scenario,
  comparison,
  io,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` distinguishes the failure
/// classes callers are expected to branch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace iarc
