#include "folio/error.hpp"

namespace folio {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kDimensionMismatch:
      return "dimension_mismatch";
    case ErrorCode::kIo:
      return "io";
    case ErrorCode::kFormat:
      return "format";
    case ErrorCode::kTruncation:
      return "truncation";
    case ErrorCode::kValidation:
      return "validation";
    case ErrorCode::kConflict:
      return "conflict";
    case ErrorCode::kNotFound:
      return "not_found";
    case ErrorCode::kEmptyCollection:
      return "empty_collection";
    case ErrorCode::kIngestion:
      return "ingestion";
    case ErrorCode::kEmptyVolume:
      return "empty_volume";
    case ErrorCode::kEmbedderUnavailable:
      return "embedder_unavailable";
    case ErrorCode::kMalformedResponse:
      return "malformed_response";
    case ErrorCode::kUndefinedRecall:
      return "undefined_recall";
  }
  return "unknown";
}

}  // namespace folio
