#include "folio/eval/metrics.hpp"

#include <algorithm>

#include "folio/error.hpp"

namespace folio::eval {

namespace {

void check_k(std::size_t k) {
  if (k == 0) throw Error(ErrorCode::kValidation, "cutoff k must be at least 1");
}

void check_relevant(const std::set<PageRef>& relevant) {
  if (relevant.empty()) {
    throw Error(ErrorCode::kUndefinedRecall, "relevant set is empty");
  }
}

std::size_t hits_at(std::span<const PageRef> ranking,
                    const std::set<PageRef>& relevant, std::size_t k) {
  const std::size_t depth = std::min(k, ranking.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < depth; ++i) hits += relevant.contains(ranking[i]) ? 1 : 0;
  return hits;
}

}  // namespace

double precision_at_k(std::span<const PageRef> ranking,
                      const std::set<PageRef>& relevant, std::size_t k) {
  check_k(k);
  return static_cast<double>(hits_at(ranking, relevant, k)) / static_cast<double>(k);
}

double recall_at_k(std::span<const PageRef> ranking,
                   const std::set<PageRef>& relevant, std::size_t k) {
  check_k(k);
  check_relevant(relevant);
  return static_cast<double>(hits_at(ranking, relevant, k)) /
         static_cast<double>(relevant.size());
}

double f1_at_k(std::span<const PageRef> ranking,
               const std::set<PageRef>& relevant, std::size_t k) {
  const double p = precision_at_k(ranking, relevant, k);
  const double r = recall_at_k(ranking, relevant, k);
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

double average_precision(std::span<const PageRef> ranking,
                         const std::set<PageRef>& relevant, std::size_t k) {
  check_k(k);
  check_relevant(relevant);
  const std::size_t depth = std::min(k, ranking.size());
  std::size_t hits = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < depth; ++i) {
    if (relevant.contains(ranking[i])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  return sum / static_cast<double>(std::min(relevant.size(), k));
}

double reciprocal_rank(std::span<const PageRef> ranking,
                       const std::set<PageRef>& relevant, std::size_t k) {
  check_k(k);
  check_relevant(relevant);
  const std::size_t depth = std::min(k, ranking.size());
  for (std::size_t i = 0; i < depth; ++i) {
    if (relevant.contains(ranking[i])) return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

QueryMetrics evaluate_ranking(std::span<const PageRef> ranking,
                              const std::set<PageRef>& relevant, std::size_t k) {
  QueryMetrics m;
  m.k = k;
  m.precision = precision_at_k(ranking, relevant, k);
  m.recall = recall_at_k(ranking, relevant, k);
  m.f1 = m.precision + m.recall == 0.0
             ? 0.0
             : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  m.average_precision = average_precision(ranking, relevant, k);
  m.reciprocal_rank = reciprocal_rank(ranking, relevant, k);
  return m;
}

}  // namespace folio::eval
