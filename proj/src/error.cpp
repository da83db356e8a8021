#include "tq/error.hpp"

namespace tq {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveRate: return "NonPositiveRate";
    case ErrorCode::FeedbackOutOfRange: return "FeedbackOutOfRange";
    case ErrorCode::BadThreshold: return "BadThreshold";
    case ErrorCode::BadCapacity: return "BadCapacity";
    case ErrorCode::SingularPhaseProcess: return "SingularPhaseProcess";
    case ErrorCode::WrongInteriorCount: return "WrongInteriorCount";
    case ErrorCode::EigenvectorResidualTooLarge: return "EigenvectorResidualTooLarge";
    case ErrorCode::DominantNotReal: return "DominantNotReal";
    case ErrorCode::DominantNotSimple: return "DominantNotSimple";
    case ErrorCode::EigenvectorNotPositive: return "EigenvectorNotPositive";
    case ErrorCode::BoundaryRankDeficient: return "BoundaryRankDeficient";
    case ErrorCode::NegativeProbability: return "NegativeProbability";
    case ErrorCode::HybridSystemSingular: return "HybridSystemSingular";
    case ErrorCode::SingularGenerator: return "SingularGenerator";
    case ErrorCode::InsufficientMass: return "InsufficientMass";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

}  // namespace tq
