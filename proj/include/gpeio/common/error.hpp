#pragma once

#include <stdexcept>
#include <string>

namespace gpeio {

enum class ErrorCode {
  kInvalidArgument,
  kOutOfRange,
  kBranchCut,
  kNotReady,
  kMissingData,
  kConditioning,
  kBehindCamera,
  kNotAnchorable,
  kInsufficientOverlap,
  kDataError,
  kSolverFailure,
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

}  // namespace gpeio
