#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "folio/embedding.hpp"
#include "folio/page_image.hpp"

namespace folio {

// Anything that turns page images and query text into multi-vectors.
// Implementations must be safe to call from several threads at once.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual MultiVector embed_image(const PageImage& image) const = 0;
  virtual MultiVector embed_text(std::string_view text) const = 0;
  virtual std::string model_id() const = 0;
};

struct EmbedderConfig {
  std::string endpoint;  // e.g. "http://127.0.0.1:8081"
  std::string model_id;  // expected model; empty accepts whatever /health says
  std::chrono::milliseconds timeout{30000};
  std::size_t max_in_flight = 4;
  std::size_t max_retries = 2;  // extra attempts after a transport failure
};

// Client for the embedding-service wire protocol:
//   POST /embed/image  body: PNG, headers X-Volume-Id / X-Page-Number
//   POST /embed/text   body: UTF-8 text
//   GET  /health       body: model id
// Both embed routes answer with rows u32 LE | dims u32 LE | rows*dims f32 LE.
class HttpEmbedder final : public Embedder {
 public:
  // Throws kValidation for max_in_flight == 0 or a malformed endpoint.
  explicit HttpEmbedder(EmbedderConfig config);

  MultiVector embed_image(const PageImage& image) const override;
  MultiVector embed_text(std::string_view text) const override;
  // Queries GET /health; throws kEmbedderUnavailable when unreachable.
  std::string model_id() const override;

  const EmbedderConfig& config() const noexcept { return config_; }

 private:
  struct Endpoint {
    std::string scheme_host_port;
    std::string base_path;
  };
  MultiVector post(const std::string& route, const std::string& body,
                   const std::string& content_type,
                   const std::vector<std::pair<std::string, std::string>>& headers,
                   const std::string& what) const;

  EmbedderConfig config_;
  Endpoint endpoint_;
};

// Wire encoding of a matrix response.
std::string encode_matrix(const MultiVector& matrix);
// Throws kMalformedResponse when the header and payload length disagree.
MultiVector decode_matrix(std::string_view bytes);

// Embeds every image with at most `max_in_flight` concurrent calls; results
// come back in input order. A failure is rethrown naming the PageRef; a batch
// whose dims disagree raises kDimensionMismatch. Empty input makes no calls.
std::vector<PageEmbedding> embed_pages(std::span<const PageImage> images,
                                       const Embedder& embedder,
                                       std::size_t max_in_flight = 4);

// Throws kValidation for text that is empty after trimming.
QueryEmbedding embed_query(std::string_view text, const Embedder& embedder,
                           std::string query_id = {});

std::string_view trim(std::string_view text) noexcept;

}  // namespace folio
