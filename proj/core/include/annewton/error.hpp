#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace annewton {

enum class ErrorCode {
  // topology
  DisconnectedGraph,
  WeightOutOfRange,
  NotSymmetric,
  NotRowStochastic,
  NegativeEntry,
  DiagonalOutOfRange,
  SparsityMismatch,
  InvalidGraph,
  // objective / splitting
  NonPositiveCurvature,
  DimensionMismatch,
  EmptyInterval,
  MaxIterationsExceeded,
  // agents
  MissingCacheEntry,
  NotANeighbor,
  // simulator / bounds
  StepsizeInadmissible,
  InvalidConstants,
  EpsilonTooLarge,
  // harness
  ConfigParse,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Library error. Every failure path in annewton throws this type; `code()`
/// identifies the failure class and `what()` carries the detail text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::WeightOutOfRange: return "WeightOutOfRange";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NotRowStochastic: return "NotRowStochastic";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::DiagonalOutOfRange: return "DiagonalOutOfRange";
    case ErrorCode::SparsityMismatch: return "SparsityMismatch";
    case ErrorCode::InvalidGraph: return "InvalidGraph";
    case ErrorCode::NonPositiveCurvature: return "NonPositiveCurvature";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyInterval: return "EmptyInterval";
    case ErrorCode::MaxIterationsExceeded: return "MaxIterationsExceeded";
    case ErrorCode::MissingCacheEntry: return "MissingCacheEntry";
    case ErrorCode::NotANeighbor: return "NotANeighbor";
    case ErrorCode::StepsizeInadmissible: return "StepsizeInadmissible";
    case ErrorCode::InvalidConstants: return "InvalidConstants";
    case ErrorCode::EpsilonTooLarge: return "EpsilonTooLarge";
    case ErrorCode::ConfigParse: return "ConfigParse";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace annewton
