#include "diffzoom/error.hpp"

namespace diffzoom {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::kUnknownModel: return "UNKNOWN_MODEL";
    case ErrorCode::kMissingParameter: return "MISSING_PARAMETER";
    case ErrorCode::kDomain: return "DOMAIN_ERROR";
    case ErrorCode::kNonfinite: return "NONFINITE_VALUE";
    case ErrorCode::kGridMisalignment: return "GRID_MISALIGNMENT";
    case ErrorCode::kWindowOutOfRange: return "WINDOW_OUT_OF_RANGE";
    case ErrorCode::kEmptyResult: return "EMPTY_RESULT";
    case ErrorCode::kNonMonotone: return "NON_MONOTONE";
    case ErrorCode::kQuadratureFailure: return "QUADRATURE_FAILURE";
    case ErrorCode::kTooFewSamples: return "TOO_FEW_SAMPLES";
    case ErrorCode::kTooManyExcluded: return "TOO_MANY_EXCLUDED";
    case ErrorCode::kConfigNotFound: return "CONFIG_NOT_FOUND";
    case ErrorCode::kConfigParse: return "CONFIG_PARSE";
    case ErrorCode::kUnknownKey: return "UNKNOWN_KEY";
    case ErrorCode::kConfigInvalid: return "CONFIG_INVALID";
    case ErrorCode::kIo: return "IO_ERROR";
  }
  return "UNKNOWN";
}

}  // namespace diffzoom
