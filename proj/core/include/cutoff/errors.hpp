#pragma once

#include <stdexcept>
#include <string>

namespace cutoff {

enum class ErrorCode {
  InvalidArgument,
  DisconnectedGraph,
  RateOutOfRange,
  SizeGuard,
  NoConvergence,
  RootNotBracketed,
  SingularSystem,
  NoBoundary,
  NearZeroEigenvalue,
  NonpositiveVariance,
  DegenerateVariance,
  DimensionMismatch,
  ScheduleBeforeZero,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

}  // namespace cutoff
