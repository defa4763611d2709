#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gghact {

enum class ErrorCode {
  SingularMatrix,
  InvalidParameter,
  InvalidInput,
  NonFiniteObjective,
  MaxIterationsExceeded,
  InfeasibleBudget,
  NoInteriorOptimum,
  NonMonotoneValue,
  NonMonotoneUnclamped,
  AllAccept,
  AllReject,
  NegativeDensity,
  DegenerateMass,
  SolverFailure,
  TimeoutExceeded,
  UnknownKey,
  DomainError,
  ParseError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::NonFiniteObjective: return "NonFiniteObjective";
    case ErrorCode::MaxIterationsExceeded: return "MaxIterationsExceeded";
    case ErrorCode::InfeasibleBudget: return "InfeasibleBudget";
    case ErrorCode::NoInteriorOptimum: return "NoInteriorOptimum";
    case ErrorCode::NonMonotoneValue: return "NonMonotoneValue";
    case ErrorCode::NonMonotoneUnclamped: return "NonMonotoneUnclamped";
    case ErrorCode::AllAccept: return "AllAccept";
    case ErrorCode::AllReject: return "AllReject";
    case ErrorCode::NegativeDensity: return "NegativeDensity";
    case ErrorCode::DegenerateMass: return "DegenerateMass";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::TimeoutExceeded: return "TimeoutExceeded";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Exception carrying a machine-readable code. what() is "<Code>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& detail) {
  throw Error(code, detail);
}

}  // namespace gghact
