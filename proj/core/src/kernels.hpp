#pragma once

#include <cstddef>

namespace folio::kernels {

// Float inputs, double accumulation. Summation order differs from a straight
// loop when vector units are available.
double dot(const float* a, const float* b, std::size_t n) noexcept;
double squared_l2(const float* a, const float* b, std::size_t n) noexcept;
double l1(const float* a, const float* b, std::size_t n) noexcept;

}  // namespace folio::kernels
