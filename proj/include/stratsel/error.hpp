#ifndef STRATSEL_ERROR_HPP_
#define STRATSEL_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace stratsel {

enum class ErrorCode {
  kUnknownColumn,
  kNonNumericColumn,
  kEmptyTable,
  kKExceedsPopulation,
  kBadFeatureIndex,
  kSampleTooSmall,
  kSampleExceedsPopulation,
  kInfeasibleBounds,
  kInstanceTooLarge,
  kLengthMismatch,
  kOverAllocated,
  kZeroVariance,
  kThetaExceedsP,
  kAllConstantCovariates,
  kZeroVarianceCovariate,
  kPTooSmall,
  kBadConfig,
  kZeroBaselineVariance,
  kPrecondition,
  kIo,
};

std::string_view error_code_name(ErrorCode code);

// Validation errors map to CLI exit code 2; everything else is a runtime
// failure (exit code 1).
bool is_validation_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) throw Error(code, message);
}

}  // namespace stratsel

#endif  // STRATSEL_ERROR_HPP_
