#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace opval {

enum class ErrorCode {
  kShapeMismatch,
  kBadProbability,
  kBadLoss,
  kBadLambda,
  kIndexOutOfRange,
  kZeroSupport,
  kBadDim,
  kNoConvergence,
  kZeroMarginal,
  kBadSubset,
  kCapExceeded,
  kBadAgent,
  kZeroProbabilityEvent,
  kParse,
  kUsage,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// the command line layer can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace opval
