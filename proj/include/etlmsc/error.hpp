#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace etlmsc {

enum class ErrorCode {
  kShapeMismatch,
  kIfftNotReal,
  kSvdDidNotConverge,
  kDegenerateData,
  kZeroDegree,
  kNoConvergence,
  kEigenFailure,
  kNotConverged,
  kViewSizeMismatch,
  kRankTooLarge,
  kLengthMismatch,
  kInvalidArgument,
  kIo,
};

std::string_view to_string(ErrorCode code);

/// Base class of every error raised by the library. The code identifies the
/// failure kind so callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kIfftNotReal: return "IfftNotReal";
    case ErrorCode::kSvdDidNotConverge: return "SvdDidNotConverge";
    case ErrorCode::kDegenerateData: return "DegenerateData";
    case ErrorCode::kZeroDegree: return "ZeroDegree";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kEigenFailure: return "EigenFailure";
    case ErrorCode::kNotConverged: return "NotConverged";
    case ErrorCode::kViewSizeMismatch: return "ViewSizeMismatch";
    case ErrorCode::kRankTooLarge: return "RankTooLarge";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace etlmsc
