#include "linksynth/error.hpp"

namespace linksynth {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotInvertible: return "NotInvertible";
    case ErrorCode::kNotRealNorm: return "NotRealNorm";
    case ErrorCode::kDegeneratePose: return "DegeneratePose";
    case ErrorCode::kOffQuadric: return "OffQuadric";
    case ErrorCode::kDegenerateCloud: return "DegenerateCloud";
    case ErrorCode::kDegenerateDirection: return "DegenerateDirection";
    case ErrorCode::kDegenerateCurve: return "DegenerateCurve";
    case ErrorCode::kNoCandidate: return "NoCandidate";
    case ErrorCode::kLineSearchFailed: return "LineSearchFailed";
    case ErrorCode::kNonGeneric: return "NonGeneric";
    case ErrorCode::kResidualTooLarge: return "ResidualTooLarge";
    case ErrorCode::kIdenticalChains: return "IdenticalChains";
    case ErrorCode::kDegenerateJoint: return "DegenerateJoint";
    case ErrorCode::kConditioningFailure: return "ConditioningFailure";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kParse: return "Parse";
  }
  return "Unknown";
}

}  // namespace linksynth
