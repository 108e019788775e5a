#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace diffzoom {

enum class ErrorCode {
  kInvalidArgument,
  kUnknownModel,
  kMissingParameter,
  kDomain,
  kNonfinite,
  kGridMisalignment,
  kWindowOutOfRange,
  kEmptyResult,
  kNonMonotone,
  kQuadratureFailure,
  kTooFewSamples,
  kTooManyExcluded,
  kConfigNotFound,
  kConfigParse,
  kUnknownKey,
  kConfigInvalid,
  kIo,
};

/// Stable, machine-greppable spelling of an error code.
std::string_view to_string(ErrorCode code) noexcept;

/// The library's single exception type. Every failure carries a code so the
/// CLI can print `error[CODE]: message` and pick an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace diffzoom
