#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace folio {

enum class ErrorCode {
  kDimensionMismatch,
  kIo,
  kFormat,
  kTruncation,
  kValidation,
  kConflict,
  kNotFound,
  kEmptyCollection,
  kIngestion,
  kEmptyVolume,
  kEmbedderUnavailable,
  kMalformedResponse,
  kUndefinedRecall,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries a machine-readable code so
// callers (CLI, HTTP service) can map it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace folio
