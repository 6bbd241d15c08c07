#pragma once

#include <stdexcept>
#include <string>

namespace qdopt {

enum class ErrorCode {
  InvalidIndex,
  DuplicateEdge,
  DisconnectedGraph,
  ConnectivityRetryExhausted,
  EigensolverFailure,
  NonFiniteInput,
  ScaleIndexMismatch,
  DimensionMismatch,
  IntegralSumNonzero,
  SaturationDetected,
  NonFiniteState,
  InfeasibleParameters,
  NotFound,
  IndivisibleCount,
  UnsupportedDimension,
  ConfigError,
  IoError,
  InvalidArgument,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qdopt
