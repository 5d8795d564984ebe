#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace folio {

// A rows x dims matrix of finite floats, row-major: the multi-vector
// embedding of one page (one row per patch) or one query (one row per token).
// Immutable once constructed; per-row L2 norms are cached for cosine scoring.
class MultiVector {
 public:
  // Throws Error(kValidation) if rows or dims is zero, if data.size() !=
  // rows * dims, or if any element is NaN/Inf.
  MultiVector(std::size_t rows, std::size_t dims, std::vector<float> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t dims() const noexcept { return dims_; }
  std::span<const float> data() const noexcept { return data_; }
  std::span<const float> row(std::size_t i) const noexcept {
    return {data_.data() + i * dims_, dims_};
  }
  double row_norm(std::size_t i) const noexcept { return norms_[i]; }
  std::span<const double> row_norms() const noexcept { return norms_; }

  // Element-wise equality on the 32-bit payload (distinguishes -0.0 and 0.0).
  bool bitwise_equal(const MultiVector& other) const noexcept;

  friend bool operator==(const MultiVector& a, const MultiVector& b) {
    return a.rows_ == b.rows_ && a.dims_ == b.dims_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_;
  std::size_t dims_;
  std::vector<float> data_;
  std::vector<double> norms_;
};

// Identity of one page: (volume, 1-based page number). Ordered
// lexicographically, which is also the tie-break order for equal scores.
struct PageRef {
  std::string volume_id;
  std::uint32_t page_number = 1;

  friend auto operator<=>(const PageRef&, const PageRef&) = default;
  friend bool operator==(const PageRef&, const PageRef&) = default;
};

// Throws Error(kValidation) for an empty volume id or page number 0.
void validate(const PageRef& page);

std::string to_string(const PageRef& page);

struct PageEmbedding {
  PageRef page;
  MultiVector embedding;

  friend bool operator==(const PageEmbedding&, const PageEmbedding&) = default;
};

struct QueryEmbedding {
  std::string query_id;
  MultiVector embedding;
};

}  // namespace folio
