#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qho {

enum class ErrorCode {
  NonPositiveAlpha,
  NonPositiveDim,
  InvalidParams,
  DimensionMismatch,
  OutOfDomain,
  NegativeEnergy,
  NonPositiveM,
  NotUnboundedRegime,
  NotBorderRegime,
  InconsistentConstants,
  Aperiodic,
  IndexError,
  NotSeparableForm,
  PolarOrigin,
  TangentPole,
  DomainEscape,
  StepUnderflow,
  NotOscillatory,
  InvalidConfig,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this type; `code()` identifies
// the violated contract, `what()` carries the detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qho
