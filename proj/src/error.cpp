#include "selffield/error.hpp"

namespace selffield {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::InvalidRelativisticVelocity: return "invalid-relativistic-velocity";
    case ErrorKind::SingularWavevector: return "singular-wavevector";
    case ErrorKind::NormalizationError: return "normalization-error";
    case ErrorKind::DivergenceError: return "divergence-error";
    case ErrorKind::NoMinimum: return "no-minimum";
    case ErrorKind::BracketFailure: return "bracket-failure";
    case ErrorKind::NotApplicable: return "not-applicable";
    case ErrorKind::NoLocalization: return "no-localization";
    case ErrorKind::GridMismatch: return "grid-mismatch";
    case ErrorKind::TimestepTooLarge: return "timestep-too-large";
    case ErrorKind::SchemaError: return "schema-error";
    case ErrorKind::IoError: return "io-error";
  }
  return "unknown";
}

}  // namespace selffield
