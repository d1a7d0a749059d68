#include "ctgaze/error.hpp"

namespace ctgaze {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::ScanpathTooShort: return "ScanpathTooShort";
    case ErrorCode::InvalidSigma: return "InvalidSigma";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::NoFixations: return "NoFixations";
    case ErrorCode::EmptyDistribution: return "EmptyDistribution";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaVersionError: return "SchemaVersionError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::HeaderMismatch: return "HeaderMismatch";
    case ErrorCode::BadRatios: return "BadRatios";
    case ErrorCode::BadK: return "BadK";
    case ErrorCode::TooFewValues: return "TooFewValues";
    case ErrorCode::NonFinite: return "NonFinite";
  }
  return "Unknown";
}

}  // namespace ctgaze
