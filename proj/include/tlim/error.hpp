#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tlim {

enum class ErrorCode {
  ParameterOutOfRange,
  MissingParameter,
  EmptySample,
  NonPositiveValue,
  ZeroMean,
  DomainViolation,
  NonFiniteMoment,
  QuadratureFailure,
  DegenerateKernel,
  NonFiniteK,
  SpecMismatch,
  InfeasibleMoments,
  FileNotFound,
  ParseError,
  AllRowsRejected,
  InvalidArgument,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
  case ErrorCode::ParameterOutOfRange: return "ParameterOutOfRange";
  case ErrorCode::MissingParameter: return "MissingParameter";
  case ErrorCode::EmptySample: return "EmptySample";
  case ErrorCode::NonPositiveValue: return "NonPositiveValue";
  case ErrorCode::ZeroMean: return "ZeroMean";
  case ErrorCode::DomainViolation: return "DomainViolation";
  case ErrorCode::NonFiniteMoment: return "NonFiniteMoment";
  case ErrorCode::QuadratureFailure: return "QuadratureFailure";
  case ErrorCode::DegenerateKernel: return "DegenerateKernel";
  case ErrorCode::NonFiniteK: return "NonFiniteK";
  case ErrorCode::SpecMismatch: return "SpecMismatch";
  case ErrorCode::InfeasibleMoments: return "InfeasibleMoments";
  case ErrorCode::FileNotFound: return "FileNotFound";
  case ErrorCode::ParseError: return "ParseError";
  case ErrorCode::AllRowsRejected: return "AllRowsRejected";
  case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Single exception type for the library. `position()` carries the offending
/// element index (NonPositiveValue) or input line (ParseError) when known.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string &what,
        std::optional<std::size_t> position = std::nullopt)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code), position_(position) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> position() const noexcept { return position_; }

private:
  ErrorCode code_;
  std::optional<std::size_t> position_;
};

} // namespace tlim
