#pragma once

#include <stdexcept>
#include <string>

namespace tq {

/// Failure categories raised by the solvers and the front end.
enum class ErrorCode {
  // parameter validation
  NonPositiveRate,
  FeedbackOutOfRange,
  BadThreshold,
  BadCapacity,
  // model / stability
  SingularPhaseProcess,
  // spectral solver
  WrongInteriorCount,
  EigenvectorResidualTooLarge,
  DominantNotReal,
  DominantNotSimple,
  EigenvectorNotPositive,
  BoundaryRankDeficient,
  NegativeProbability,
  HybridSystemSingular,
  // brute-force solver
  SingularGenerator,
  InsufficientMass,
  // metrics
  NotNormalized,
  // simulation
  ConfigInvalid,
  // front end
  ParseError,
  UnknownKey,
  TooFewPoints,
  IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tq
