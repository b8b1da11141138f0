#include "bsb/errors.hpp"

namespace bsb {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::OrderingViolation: return "OrderingViolation";
    case ErrorCode::NegativeDamping: return "NegativeDamping";
    case ErrorCode::NonfiniteValue: return "NonfiniteValue";
    case ErrorCode::ZeroElements: return "ZeroElements";
    case ErrorCode::NonpositiveLength: return "NonpositiveLength";
    case ErrorCode::IncompatibleInterface: return "IncompatibleInterface";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SolveFailure: return "SolveFailure";
    case ErrorCode::NonpositiveC4: return "NonpositiveC4";
    case ErrorCode::FactorizationFailure: return "FactorizationFailure";
    case ErrorCode::EmptySpectrum: return "EmptySpectrum";
    case ErrorCode::NonpositiveParameter: return "NonpositiveParameter";
    case ErrorCode::NonpositiveEnergy: return "NonpositiveEnergy";
    case ErrorCode::WindowTooSmall: return "WindowTooSmall";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::UsageError: return "UsageError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace bsb
