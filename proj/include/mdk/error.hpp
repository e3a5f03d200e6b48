#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mdk {

enum class ErrorCode {
  Degenerate,
  OriginNotInterior,
  NonCoprime,
  Overflow,
  OracleMismatch,
  SolveFailure,
  RootFindingFailure,
  ContinuityLoss,
  AmbiguousMatching,
  NotInOrbit,
  InvalidGraph,
  NoMatching,
  NoneFound,
  SheetTrackingFailure,
  NotBijective,
  CountMismatch,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::OriginNotInterior: return "OriginNotInterior";
    case ErrorCode::NonCoprime: return "NonCoprime";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::OracleMismatch: return "OracleMismatch";
    case ErrorCode::SolveFailure: return "SolveFailure";
    case ErrorCode::RootFindingFailure: return "RootFindingFailure";
    case ErrorCode::ContinuityLoss: return "ContinuityLoss";
    case ErrorCode::AmbiguousMatching: return "AmbiguousMatching";
    case ErrorCode::NotInOrbit: return "NotInOrbit";
    case ErrorCode::InvalidGraph: return "InvalidGraph";
    case ErrorCode::NoMatching: return "NoMatching";
    case ErrorCode::NoneFound: return "NoneFound";
    case ErrorCode::SheetTrackingFailure: return "SheetTrackingFailure";
    case ErrorCode::NotBijective: return "NotBijective";
    case ErrorCode::CountMismatch: return "CountMismatch";
  }
  return "Unknown";
}

/// Domain error raised by every stage of the pipeline. The code is stable and
/// machine-readable; the message carries the diagnostic.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mdk
