#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bsb {

enum class ErrorCode {
  OrderingViolation,
  NegativeDamping,
  NonfiniteValue,
  ZeroElements,
  NonpositiveLength,
  IncompatibleInterface,
  OutOfDomain,
  DimensionMismatch,
  SolveFailure,
  NonpositiveC4,
  FactorizationFailure,
  EmptySpectrum,
  NonpositiveParameter,
  NonpositiveEnergy,
  WindowTooSmall,
  ConfigError,
  UsageError,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; the code identifies the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bsb
