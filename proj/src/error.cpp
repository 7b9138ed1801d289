#include <photon_povm/error.hpp>

namespace photon_povm {

std::string_view to_string(ErrorCode code) {
  switch (code) {
  case ErrorCode::InvalidArgument: return "InvalidArgument";
  case ErrorCode::NonPropagatingMode: return "NonPropagatingMode";
  case ErrorCode::ParaxialViolation: return "ParaxialViolation";
  case ErrorCode::DegeneratePulse: return "DegeneratePulse";
  case ErrorCode::NotNormalized: return "NotNormalized";
  case ErrorCode::NotSymmetric: return "NotSymmetric";
  case ErrorCode::NonPositiveK: return "NonPositiveK";
  case ErrorCode::GridMismatch: return "GridMismatch";
  case ErrorCode::InsufficientBandwidth: return "InsufficientBandwidth";
  case ErrorCode::PixelOutOfRange: return "PixelOutOfRange";
  case ErrorCode::NonPositiveWindow: return "NonPositiveWindow";
  case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
  case ErrorCode::ProbabilityDeficit: return "ProbabilityDeficit";
  case ErrorCode::EmptyRecord: return "EmptyRecord";
  case ErrorCode::NegativeKernel: return "NegativeKernel";
  case ErrorCode::ConfigError: return "ConfigError";
  case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

} // namespace photon_povm
