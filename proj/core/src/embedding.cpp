#include "folio/embedding.hpp"

#include <cmath>
#include <cstring>

#include "folio/error.hpp"
#include "kernels.hpp"

namespace folio {

MultiVector::MultiVector(std::size_t rows, std::size_t dims,
                         std::vector<float> data)
    : rows_(rows), dims_(dims), data_(std::move(data)) {
  if (rows_ == 0 || dims_ == 0) {
    throw Error(ErrorCode::kValidation,
                "multi-vector needs at least one row and one dimension");
  }
  if (data_.size() != rows_ * dims_) {
    throw Error(ErrorCode::kValidation,
                "multi-vector payload has " + std::to_string(data_.size()) +
                    " values, expected " + std::to_string(rows_) + "x" +
                    std::to_string(dims_));
  }
  norms_.resize(rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    const float* p = data_.data() + r * dims_;
    for (std::size_t c = 0; c < dims_; ++c) {
      if (!std::isfinite(p[c])) {
        throw Error(ErrorCode::kValidation,
                    "non-finite value at row " + std::to_string(r) +
                        ", column " + std::to_string(c));
      }
    }
    // Same kernel as cosine_sim so cached norms match it bit for bit.
    norms_[r] = std::sqrt(kernels::dot(p, p, dims_));
  }
}

bool MultiVector::bitwise_equal(const MultiVector& other) const noexcept {
  return rows_ == other.rows_ && dims_ == other.dims_ &&
         std::memcmp(data_.data(), other.data_.data(),
                     data_.size() * sizeof(float)) == 0;
}

void validate(const PageRef& page) {
  if (page.volume_id.empty()) {
    throw Error(ErrorCode::kValidation, "page reference has empty volume id");
  }
  if (page.page_number == 0) {
    throw Error(ErrorCode::kValidation,
                "page numbers are 1-based (volume " + page.volume_id + ")");
  }
}

std::string to_string(const PageRef& page) {
  return page.volume_id + "/" + std::to_string(page.page_number);
}

}  // namespace folio
