#include "aes/error.hpp"

namespace aes {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidSimplex: return "InvalidSimplex";
    case ErrorCode::SupportMismatch: return "SupportMismatch";
    case ErrorCode::NonPositiveTemperature: return "NonPositiveTemperature";
    case ErrorCode::InvalidEpsilon: return "InvalidEpsilon";
    case ErrorCode::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::BoundaryIterate: return "BoundaryIterate";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::MissingScheduleMetadata: return "MissingScheduleMetadata";
    case ErrorCode::InvalidSchedule: return "InvalidSchedule";
    case ErrorCode::EmptyBatch: return "EmptyBatch";
    case ErrorCode::NegativeError: return "NegativeError";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::InvalidMdp: return "InvalidMdp";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::AlignmentError: return "AlignmentError";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::ZeroBaseline: return "ZeroBaseline";
    case ErrorCode::NoPreWindow: return "NoPreWindow";
    case ErrorCode::InvalidCurve: return "InvalidCurve";
    case ErrorCode::SamplerFailure: return "SamplerFailure";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

}  // namespace aes
