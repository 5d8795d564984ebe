#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "folio/embedder.hpp"

namespace folio {

// Deterministic stand-in for the model server. Row r of the matrix for
// `input` is drawn from std::mt19937_64 seeded with
//   FNV-1a-64( seed as u64 LE || input bytes || r as u64 LE )
// and each value is ((draw >> 11) * 2^-53) * 2 - 1, rounded to float, so it
// lies in [-1, 1]. Both the hash and the generator are fixed by the C++
// standard / this file, so matrices are identical on every platform.
//
// Because rows are generated independently, the first n rows of an input's
// matrix do not depend on how many rows were requested.
MultiVector mock_embed(std::span<const std::uint8_t> input, std::size_t rows,
                       std::size_t dims, std::uint64_t seed);
MultiVector mock_embed(std::string_view input, std::size_t rows,
                       std::size_t dims, std::uint64_t seed);

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes,
                      std::uint64_t state = 0xcbf29ce484222325ull) noexcept;

struct MockEmbedderConfig {
  std::size_t page_rows = 32;
  std::size_t dims = 16;
  std::uint64_t seed = 7;
  // Rows per query; 0 means one row per whitespace-separated token.
  std::size_t query_rows = 0;
};

class MockEmbedder final : public Embedder {
 public:
  explicit MockEmbedder(MockEmbedderConfig config);

  // Hashes the PNG bytes.
  MultiVector embed_image(const PageImage& image) const override;
  // Hashes the trimmed text.
  MultiVector embed_text(std::string_view text) const override;
  std::string model_id() const override;

  // Page-shaped matrix for an arbitrary input (used for synthetic corpora).
  MultiVector embed_page_input(std::string_view input) const;

  const MockEmbedderConfig& config() const noexcept { return config_; }

 private:
  MockEmbedderConfig config_;
};

std::size_t count_tokens(std::string_view text) noexcept;

}  // namespace folio
