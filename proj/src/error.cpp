#include "calibra/error.hpp"

namespace calibra {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kInvalidProbability: return "InvalidProbability";
    case ErrorCode::kLabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::kValueOutOfDomain: return "ValueOutOfDomain";
    case ErrorCode::kInvalidBinCount: return "InvalidBinCount";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kNonPositiveAlpha: return "NonPositiveAlpha";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kMissingSeries: return "MissingSeries";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kInternal: return "Internal";
  }
  return "Unknown";
}

}  // namespace calibra
