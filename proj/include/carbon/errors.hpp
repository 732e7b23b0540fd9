#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace carbon {

enum class Errc {
  kNonAligned,
  kInvalidMeter,
  kInvalidArgument,
  kParse,
  kIoFailure,
  kDuplicatePhase,
  kUnauthorized,
  kRejected,
  kDuplicateName,
  kUnknownIdentity,
  kNegativePower,
  kNonPositiveDuration,
  kFactorOutOfRange,
  kAlreadyAccrued,
  kNoValidEnergy,
  kIllegalTransition,
  kNotFound,
  kMissingData,
};

std::string_view errc_name(Errc code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace carbon
