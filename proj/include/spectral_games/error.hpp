#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spectral_games {

enum class ErrorCode {
  InvalidArgument,
  NonSquare,
  DimensionMismatch,
  ConvergenceFailure,
  InvalidShape,
  UnrepresentableEllipse,
  NotConvergent,
  UnsupportedShape,
  InvalidPerturbation,
  DegenerateInput,
  InadmissibleTau,
  SingularLeastSquares,
  UnpairedComplexEigenvalue,
  NonPositiveDistance,
  UnsupportedFamily,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Numeric failure carrying a machine-checkable code. The message names the
/// violated precondition.
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
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::InvalidShape: return "InvalidShape";
    case ErrorCode::UnrepresentableEllipse: return "UnrepresentableEllipse";
    case ErrorCode::NotConvergent: return "NotConvergent";
    case ErrorCode::UnsupportedShape: return "UnsupportedShape";
    case ErrorCode::InvalidPerturbation: return "InvalidPerturbation";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::InadmissibleTau: return "InadmissibleTau";
    case ErrorCode::SingularLeastSquares: return "SingularLeastSquares";
    case ErrorCode::UnpairedComplexEigenvalue: return "UnpairedComplexEigenvalue";
    case ErrorCode::NonPositiveDistance: return "NonPositiveDistance";
    case ErrorCode::UnsupportedFamily: return "UnsupportedFamily";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace spectral_games
