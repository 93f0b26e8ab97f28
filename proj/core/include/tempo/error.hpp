#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace tempo {

enum class ErrorCode {
  kUnsupportedLanguage,
  kInvalidArgument,
  kEmptyInput,
  kMissingBackTranslation,
  kConfig,
  kTransport,
  kRetryExhausted,
  kEmptyCompletion,
  kParse,
  kDimensionMismatch,
  kZeroVector,
  kNonMonotoneTimestamps,
  kInvalidBanding,
  kInsufficientSupply,
  kTagger,
  kSupportMismatch,
  kIo,
};

std::string_view error_code_name(ErrorCode code);

// Base for every error raised by the library. `code()` is stable and is what
// the CLI and the HTTP service surface in machine-readable envelopes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class RetryExhaustedError : public Error {
 public:
  RetryExhaustedError(std::size_t attempts, const std::string& last_error)
      : Error(ErrorCode::kRetryExhausted,
              "upstream request failed after " + std::to_string(attempts) +
                  " attempts: " + last_error),
        attempts_(attempts) {}

  std::size_t attempts() const noexcept { return attempts_; }

 private:
  std::size_t attempts_;
};

class InsufficientSupplyError : public Error {
 public:
  InsufficientSupplyError(std::string domain, std::size_t have, std::size_t want)
      : Error(ErrorCode::kInsufficientSupply,
              "domain '" + domain + "' has " + std::to_string(have) +
                  " records but quota is " + std::to_string(want)),
        domain_(std::move(domain)) {}

  const std::string& domain() const noexcept { return domain_; }

 private:
  std::string domain_;
};

}  // namespace tempo
