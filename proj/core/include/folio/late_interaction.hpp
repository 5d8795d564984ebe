#pragma once

#include <cstddef>
#include <vector>

#include "folio/embedding.hpp"
#include "folio/metric.hpp"

namespace folio {

struct TokenMatch {
  std::size_t token = 0;
  std::size_t patch = 0;  // lowest index among equally similar patches
  double similarity = 0.0;

  friend bool operator==(const TokenMatch&, const TokenMatch&) = default;
};

struct ScoreExplanation {
  std::vector<TokenMatch> per_token;  // one entry per query row, in order
  double total = 0.0;
};

// MaxSim late interaction: for each query row the best similarity over all
// document rows, summed over query rows. Throws kDimensionMismatch when the
// matrices disagree on dims.
double maxsim_score(const MultiVector& query, const MultiVector& doc,
                    Metric metric);

// Same computation, keeping the winning patch per token. `total` is
// bit-identical to maxsim_score on the same inputs.
ScoreExplanation maxsim_explain(const MultiVector& query, const MultiVector& doc,
                                Metric metric);

// Reference implementation: plain nested loops with double accumulation and
// no shared code with the production kernels. Used for equivalence checks.
double oracle_score(const MultiVector& query, const MultiVector& doc,
                    Metric metric);

// Raw MaxSim divided by the number of query rows; for cosine this is the
// mean per-token best similarity, bounded by 1.
inline double normalized_score(double raw, std::size_t query_rows) noexcept {
  return query_rows == 0 ? 0.0 : raw / static_cast<double>(query_rows);
}

}  // namespace folio
