#include "tempo/error.hpp"

namespace tempo {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnsupportedLanguage: return "unsupported_language";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kEmptyInput: return "empty_input";
    case ErrorCode::kMissingBackTranslation: return "missing_back_translation";
    case ErrorCode::kConfig: return "config_error";
    case ErrorCode::kTransport: return "transport_error";
    case ErrorCode::kRetryExhausted: return "retry_exhausted";
    case ErrorCode::kEmptyCompletion: return "empty_completion";
    case ErrorCode::kParse: return "parse_error";
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kZeroVector: return "zero_vector";
    case ErrorCode::kNonMonotoneTimestamps: return "non_monotone_timestamps";
    case ErrorCode::kInvalidBanding: return "invalid_banding";
    case ErrorCode::kInsufficientSupply: return "insufficient_supply";
    case ErrorCode::kTagger: return "tagger_error";
    case ErrorCode::kSupportMismatch: return "support_mismatch";
    case ErrorCode::kIo: return "io_error";
  }
  return "unknown";
}

}  // namespace tempo
