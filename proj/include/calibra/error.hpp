#pragma once

#include <stdexcept>
#include <string>

namespace calibra {

enum class ErrorCode {
  kEmptyDataset = 1,
  kDimensionMismatch,
  kInvalidProbability,
  kLabelOutOfRange,
  kValueOutOfDomain,
  kInvalidBinCount,
  kTooFewSamples,
  kNonPositiveAlpha,
  kParseError,
  kMissingSeries,
  kInvalidArgument,
  kIoError,
  kInternal,
};

const char* error_code_name(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so the
// C boundary can translate it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace calibra
