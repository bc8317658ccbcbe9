#pragma once

#include <stdexcept>
#include <string>

namespace g2flow {

enum class ErrorCode {
  DimensionMismatch,
  DegreeError,
  SingularMatrix,
  NotPositiveDefinite,
  VolumeMismatch,
  NotStable,
  NotPositive,
  NotNegative,
  NotCompatible,
  NotNormalized,
  DegenerateOmega,
  FrameNotAdapted,
  NotNormal,
  NotInSp,
  OutOfDomain,
  IdentityViolation,
  ZeroBracket,
  Parse,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace g2flow
