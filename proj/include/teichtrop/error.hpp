#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace teichtrop {

enum class ErrorCode {
  InvalidArgument,
  ParseError,
  UnsupportedGenus,
  DegenerateLength,
  NotHyperbolic,
  NotConverged,
  NotDivergent,
  EllipticElement,
  NoDtCoords,
  EmptyInput,
  RootFinderStall,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::ParseError: return "PARSE_ERROR";
    case ErrorCode::UnsupportedGenus: return "UNSUPPORTED_GENUS";
    case ErrorCode::DegenerateLength: return "DEGENERATE_LENGTH";
    case ErrorCode::NotHyperbolic: return "NOT_HYPERBOLIC";
    case ErrorCode::NotConverged: return "NOT_CONVERGED";
    case ErrorCode::NotDivergent: return "NOT_DIVERGENT";
    case ErrorCode::EllipticElement: return "ELLIPTIC_ELEMENT";
    case ErrorCode::NoDtCoords: return "NO_DT_COORDS";
    case ErrorCode::EmptyInput: return "EMPTY_INPUT";
    case ErrorCode::RootFinderStall: return "ROOT_FINDER_STALL";
  }
  return "UNKNOWN";
}

/// Exception carrying one of the library's error codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), message_(what) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& message() const noexcept { return message_; }  // without the code prefix

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace teichtrop
