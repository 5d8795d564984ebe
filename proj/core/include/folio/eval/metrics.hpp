#pragma once

#include <cstddef>
#include <set>
#include <span>

#include "folio/embedding.hpp"

namespace folio::eval {

// Binary-relevance cutoff metrics over a ranked list of pages. All throw
// Error(kValidation) for k == 0. Everything except precision_at_k throws
// Error(kUndefinedRecall) when `relevant` is empty.

// |top-k ∩ relevant| / k, even when fewer than k pages were retrieved.
double precision_at_k(std::span<const PageRef> ranking,
                      const std::set<PageRef>& relevant, std::size_t k);
// |top-k ∩ relevant| / |relevant|.
double recall_at_k(std::span<const PageRef> ranking,
                   const std::set<PageRef>& relevant, std::size_t k);
// Harmonic mean of the two; 0 when both are 0.
double f1_at_k(std::span<const PageRef> ranking,
               const std::set<PageRef>& relevant, std::size_t k);
// Sum of precision@i over relevant ranks i <= k, divided by
// min(|relevant|, k).
double average_precision(std::span<const PageRef> ranking,
                         const std::set<PageRef>& relevant, std::size_t k);
// 1 / rank of the first relevant page within the top k, else 0.
double reciprocal_rank(std::span<const PageRef> ranking,
                       const std::set<PageRef>& relevant, std::size_t k);

struct QueryMetrics {
  std::size_t k = 5;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double average_precision = 0.0;
  double reciprocal_rank = 0.0;
};

QueryMetrics evaluate_ranking(std::span<const PageRef> ranking,
                              const std::set<PageRef>& relevant, std::size_t k);

}  // namespace folio::eval
