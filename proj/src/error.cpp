#include "qdopt/error.hpp"

namespace qdopt {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidIndex: return "InvalidIndex";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::ConnectivityRetryExhausted: return "ConnectivityRetryExhausted";
    case ErrorCode::EigensolverFailure: return "EigensolverFailure";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::ScaleIndexMismatch: return "ScaleIndexMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::IntegralSumNonzero: return "IntegralSumNonzero";
    case ErrorCode::SaturationDetected: return "SaturationDetected";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::InfeasibleParameters: return "InfeasibleParameters";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::IndivisibleCount: return "IndivisibleCount";
    case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Error";
}

}  // namespace qdopt
