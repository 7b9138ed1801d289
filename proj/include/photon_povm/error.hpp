#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace photon_povm {

enum class ErrorCode {
  InvalidArgument,
  NonPropagatingMode,
  ParaxialViolation,
  DegeneratePulse,
  NotNormalized,
  NotSymmetric,
  NonPositiveK,
  GridMismatch,
  InsufficientBandwidth,
  PixelOutOfRange,
  NonPositiveWindow,
  QuadratureNotConverged,
  ProbabilityDeficit,
  EmptyRecord,
  NegativeKernel,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library. The code names the failure kind;
/// the message carries the offending values.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

} // namespace photon_povm
