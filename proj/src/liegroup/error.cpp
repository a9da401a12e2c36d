#include "gpeio/common/error.hpp"

namespace gpeio {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kOutOfRange: return "out of range";
    case ErrorCode::kBranchCut: return "near branch cut";
    case ErrorCode::kNotReady: return "not ready";
    case ErrorCode::kMissingData: return "missing data";
    case ErrorCode::kConditioning: return "ill-conditioned";
    case ErrorCode::kBehindCamera: return "behind camera";
    case ErrorCode::kNotAnchorable: return "not anchorable";
    case ErrorCode::kInsufficientOverlap: return "insufficient overlap";
    case ErrorCode::kDataError: return "data error";
    case ErrorCode::kSolverFailure: return "solver failure";
  }
  return "unknown";
}

}  // namespace gpeio
