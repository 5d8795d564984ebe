#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstring>
#include <mutex>
#include <optional>
#include <thread>

#include "folio/embedder.hpp"
#include "folio/error.hpp"

namespace folio {

namespace {

void append_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t read_u32(const char* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  }
  return v;
}

}  // namespace

std::string_view trim(std::string_view text) noexcept {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) {
    text.remove_prefix(1);
  }
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
    text.remove_suffix(1);
  }
  return text;
}

std::string encode_matrix(const MultiVector& matrix) {
  std::string out;
  out.reserve(8 + matrix.data().size_bytes());
  append_u32(out, static_cast<std::uint32_t>(matrix.rows()));
  append_u32(out, static_cast<std::uint32_t>(matrix.dims()));
  for (float f : matrix.data()) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    append_u32(out, bits);
  }
  return out;
}

MultiVector decode_matrix(std::string_view bytes) {
  if (bytes.size() < 8) {
    throw Error(ErrorCode::kMalformedResponse, "matrix response shorter than header");
  }
  const std::uint32_t rows = read_u32(bytes.data());
  const std::uint32_t dims = read_u32(bytes.data() + 4);
  const std::uint64_t expected = 8 + static_cast<std::uint64_t>(rows) * dims * 4;
  if (rows == 0 || dims == 0 || bytes.size() != expected) {
    throw Error(ErrorCode::kMalformedResponse,
                "matrix response declares " + std::to_string(rows) + "x" +
                    std::to_string(dims) + " but carries " +
                    std::to_string(bytes.size()) + " bytes");
  }
  std::vector<float> data(static_cast<std::size_t>(rows) * dims);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::uint32_t bits = read_u32(bytes.data() + 8 + 4 * i);
    std::memcpy(&data[i], &bits, 4);
  }
  try {
    return MultiVector(rows, dims, std::move(data));
  } catch (const Error& e) {
    throw Error(ErrorCode::kMalformedResponse, e.what());
  }
}

std::vector<PageEmbedding> embed_pages(std::span<const PageImage> images,
                                       const Embedder& embedder,
                                       std::size_t max_in_flight) {
  if (max_in_flight == 0) {
    throw Error(ErrorCode::kValidation, "max_in_flight must be at least 1");
  }
  const std::size_t n = images.size();
  if (n == 0) return {};

  std::vector<std::optional<MultiVector>> results(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::optional<std::pair<std::size_t, Error>> first_error;

  auto worker = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        results[i] = embedder.embed_image(images[i]);
      } catch (const Error& e) {
        std::lock_guard lock(error_mutex);
        if (!first_error || i < first_error->first) first_error.emplace(i, e);
        failed = true;
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        if (!first_error || i < first_error->first) {
          first_error.emplace(i, Error(ErrorCode::kEmbedderUnavailable, e.what()));
        }
        failed = true;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const std::size_t workers = std::min(max_in_flight, n);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (first_error) {
    const auto& [index, error] = *first_error;
    throw Error(error.code(), "page " + to_string(images[index].page) + ": " +
                                  error.what());
  }

  std::vector<PageEmbedding> out;
  out.reserve(n);
  const std::size_t dims = results.front()->dims();
  for (std::size_t i = 0; i < n; ++i) {
    if (results[i]->dims() != dims) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "embedder returned dims " + std::to_string(results[i]->dims()) +
                      " for page " + to_string(images[i].page) + " but " +
                      std::to_string(dims) + " earlier in the batch");
    }
    out.push_back({images[i].page, std::move(*results[i])});
  }
  return out;
}

QueryEmbedding embed_query(std::string_view text, const Embedder& embedder,
                           std::string query_id) {
  const std::string_view trimmed = trim(text);
  if (trimmed.empty()) {
    throw Error(ErrorCode::kValidation, "query text is empty");
  }
  return {std::move(query_id), embedder.embed_text(trimmed)};
}

}  // namespace folio
