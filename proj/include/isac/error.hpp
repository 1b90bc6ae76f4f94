#pragma once

#include <stdexcept>
#include <string>

namespace isac {

// Values are shared with the C API (isac_status in isac.h); keep them in sync.
enum class ErrorCode : int {
  Ok = 0,
  InvalidArgument = 1,
  DimensionMismatch = 2,
  RankDeficientChannel = 3,
  NumericalFailure = 4,
  InvalidBracket = 5,
  SingularCovariance = 6,
  FixedPointDiverged = 7,
  IllConditionedDual = 8,
  NumericalDivergence = 9,
  ExtractionDegenerate = 10,
  NotPSD = 11,
  InternalConsistency = 12,
  Infeasible = 13,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace isac
