#include "stratsel/error.hpp"

namespace stratsel {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownColumn: return "UnknownColumn";
    case ErrorCode::kNonNumericColumn: return "NonNumericColumn";
    case ErrorCode::kEmptyTable: return "EmptyTable";
    case ErrorCode::kKExceedsPopulation: return "KExceedsPopulation";
    case ErrorCode::kBadFeatureIndex: return "BadFeatureIndex";
    case ErrorCode::kSampleTooSmall: return "SampleTooSmall";
    case ErrorCode::kSampleExceedsPopulation: return "SampleExceedsPopulation";
    case ErrorCode::kInfeasibleBounds: return "InfeasibleBounds";
    case ErrorCode::kInstanceTooLarge: return "InstanceTooLarge";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kOverAllocated: return "OverAllocated";
    case ErrorCode::kZeroVariance: return "ZeroVariance";
    case ErrorCode::kThetaExceedsP: return "ThetaExceedsP";
    case ErrorCode::kAllConstantCovariates: return "AllConstantCovariates";
    case ErrorCode::kZeroVarianceCovariate: return "ZeroVarianceCovariate";
    case ErrorCode::kPTooSmall: return "PTooSmall";
    case ErrorCode::kBadConfig: return "BadConfig";
    case ErrorCode::kZeroBaselineVariance: return "ZeroBaselineVariance";
    case ErrorCode::kPrecondition: return "Precondition";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

bool is_validation_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownColumn:
    case ErrorCode::kNonNumericColumn:
    case ErrorCode::kEmptyTable:
    case ErrorCode::kKExceedsPopulation:
    case ErrorCode::kBadFeatureIndex:
    case ErrorCode::kSampleTooSmall:
    case ErrorCode::kSampleExceedsPopulation:
    case ErrorCode::kInfeasibleBounds:
    case ErrorCode::kThetaExceedsP:
    case ErrorCode::kPTooSmall:
    case ErrorCode::kBadConfig:
    case ErrorCode::kPrecondition:
      return true;
    default:
      return false;
  }
}

}  // namespace stratsel
