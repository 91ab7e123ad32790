#pragma once

#include <stdexcept>
#include <string>

namespace aes {

enum class ErrorCode {
  InvalidSimplex,
  SupportMismatch,
  NonPositiveTemperature,
  InvalidEpsilon,
  NonFiniteGradient,
  BoundaryIterate,
  LengthMismatch,
  MissingScheduleMetadata,
  InvalidSchedule,
  EmptyBatch,
  NegativeError,
  ShapeMismatch,
  InvalidMdp,
  NoConvergence,
  SingularSystem,
  InvalidSpec,
  AlignmentError,
  TooShort,
  ZeroBaseline,
  NoPreWindow,
  InvalidCurve,
  SamplerFailure,
  ConfigError,
  IoError,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace aes
