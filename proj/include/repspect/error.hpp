#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace repspect {

enum class ErrorKind {
  ClosureOverflow,
  NonInvertibleGenerator,
  IncompleteTable,
  UnknownName,
  BadParams,
  SingularGram,
  DimensionMismatch,
  NotUnitVector,
  ZeroDirection,
  ThresholdAmbiguity,
  NonStabilizedDimension,
  InconsistentDimensions,
  NotReducible,
  DegenerateSpectrum,
  BadMeasureSpec,
  NotDiscrete,
  TraceNotOne,
  NotSumZero,
  TooLarge,
  ParseError,
  ValidationError,
  VerdictConflict,
  IoError,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ClosureOverflow: return "ClosureOverflow";
    case ErrorKind::NonInvertibleGenerator: return "NonInvertibleGenerator";
    case ErrorKind::IncompleteTable: return "IncompleteTable";
    case ErrorKind::UnknownName: return "UnknownName";
    case ErrorKind::BadParams: return "BadParams";
    case ErrorKind::SingularGram: return "SingularGram";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotUnitVector: return "NotUnitVector";
    case ErrorKind::ZeroDirection: return "ZeroDirection";
    case ErrorKind::ThresholdAmbiguity: return "ThresholdAmbiguity";
    case ErrorKind::NonStabilizedDimension: return "NonStabilizedDimension";
    case ErrorKind::InconsistentDimensions: return "InconsistentDimensions";
    case ErrorKind::NotReducible: return "NotReducible";
    case ErrorKind::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorKind::BadMeasureSpec: return "BadMeasureSpec";
    case ErrorKind::NotDiscrete: return "NotDiscrete";
    case ErrorKind::TraceNotOne: return "TraceNotOne";
    case ErrorKind::NotSumZero: return "NotSumZero";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::VerdictConflict: return "VerdictConflict";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

/// Errors that mean the numerical pipeline itself could not reach a
/// trustworthy answer, as opposed to bad input.
inline bool is_numerical_failure(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ThresholdAmbiguity:
    case ErrorKind::NonStabilizedDimension:
    case ErrorKind::VerdictConflict:
    case ErrorKind::InconsistentDimensions:
    case ErrorKind::DegenerateSpectrum:
    case ErrorKind::SingularGram:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace repspect
