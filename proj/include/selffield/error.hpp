#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace selffield {

enum class ErrorKind {
  InvalidArgument,
  InvalidRelativisticVelocity,
  SingularWavevector,
  NormalizationError,
  DivergenceError,
  NoMinimum,
  BracketFailure,
  NotApplicable,
  NoLocalization,
  GridMismatch,
  TimestepTooLarge,
  SchemaError,
  IoError,
};

/// Stable kebab-case name used in CLI messages and JSON reports.
std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace selffield
