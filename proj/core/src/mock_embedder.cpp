#include "folio/mock_embedder.hpp"

#include <cctype>
#include <random>

#include "folio/error.hpp"

namespace folio {

namespace {

constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

std::uint64_t fnv1a_u64(std::uint64_t state, std::uint64_t value) noexcept {
  for (int i = 0; i < 8; ++i) {
    state ^= (value >> (8 * i)) & 0xffu;
    state *= kFnvPrime;
  }
  return state;
}

std::span<const std::uint8_t> as_bytes(std::string_view s) noexcept {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

}  // namespace

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes,
                      std::uint64_t state) noexcept {
  for (std::uint8_t b : bytes) {
    state ^= b;
    state *= kFnvPrime;
  }
  return state;
}

MultiVector mock_embed(std::span<const std::uint8_t> input, std::size_t rows,
                       std::size_t dims, std::uint64_t seed) {
  if (rows == 0 || dims == 0) {
    throw Error(ErrorCode::kValidation, "mock embedding needs rows, dims >= 1");
  }
  const std::uint64_t prefix =
      fnv1a64(input, fnv1a_u64(0xcbf29ce484222325ull, seed));
  std::vector<float> data(rows * dims);
  for (std::size_t r = 0; r < rows; ++r) {
    std::mt19937_64 gen(fnv1a_u64(prefix, r));
    float* out = data.data() + r * dims;
    for (std::size_t c = 0; c < dims; ++c) {
      const double unit = static_cast<double>(gen() >> 11) * 0x1.0p-53;
      out[c] = static_cast<float>(unit * 2.0 - 1.0);
    }
  }
  return MultiVector(rows, dims, std::move(data));
}

MultiVector mock_embed(std::string_view input, std::size_t rows,
                       std::size_t dims, std::uint64_t seed) {
  return mock_embed(as_bytes(input), rows, dims, seed);
}

std::size_t count_tokens(std::string_view text) noexcept {
  std::size_t tokens = 0;
  bool in_token = false;
  for (char c : text) {
    const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!space && !in_token) ++tokens;
    in_token = !space;
  }
  return tokens;
}

MockEmbedder::MockEmbedder(MockEmbedderConfig config) : config_(config) {
  if (config_.page_rows == 0 || config_.dims == 0) {
    throw Error(ErrorCode::kValidation, "mock embedder needs rows, dims >= 1");
  }
}

MultiVector MockEmbedder::embed_image(const PageImage& image) const {
  return mock_embed(std::span<const std::uint8_t>(image.png), config_.page_rows,
                    config_.dims, config_.seed);
}

MultiVector MockEmbedder::embed_text(std::string_view text) const {
  const std::string_view trimmed = trim(text);
  if (trimmed.empty()) {
    throw Error(ErrorCode::kValidation, "query text is empty");
  }
  const std::size_t rows =
      config_.query_rows != 0 ? config_.query_rows : count_tokens(trimmed);
  return mock_embed(trimmed, rows, config_.dims, config_.seed);
}

MultiVector MockEmbedder::embed_page_input(std::string_view input) const {
  return mock_embed(input, config_.page_rows, config_.dims, config_.seed);
}

std::string MockEmbedder::model_id() const {
  return "mock-fnv1a-mt19937_64/rows=" + std::to_string(config_.page_rows) +
         "/dims=" + std::to_string(config_.dims) +
         "/seed=" + std::to_string(config_.seed);
}

}  // namespace folio
