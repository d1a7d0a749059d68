#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ctgaze {

enum class ErrorCode {
  InvalidArgument,
  InvariantViolation,
  ScanpathTooShort,
  InvalidSigma,
  DimensionMismatch,
  ZeroVariance,
  NoFixations,
  EmptyDistribution,
  GridMismatch,
  IndexOutOfRange,
  ParseError,
  SchemaVersionError,
  IoError,
  HeaderMismatch,
  BadRatios,
  BadK,
  TooFewValues,
  NonFinite,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI error ledger in particular) can classify it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ctgaze
