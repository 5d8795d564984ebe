#include "folio/late_interaction.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "folio/error.hpp"
#include "kernels.hpp"

namespace folio {

namespace {

void check_dims(const MultiVector& query, const MultiVector& doc) {
  if (query.dims() != doc.dims()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "query dims " + std::to_string(query.dims()) +
                    " != document dims " + std::to_string(doc.dims()));
  }
}

// Fills best[i] / best_patch[i] for every query row. Document rows are the
// outer loop so each patch is streamed once while the query stays cached.
void best_matches(const MultiVector& query, const MultiVector& doc,
                  Metric metric, std::vector<double>& best,
                  std::vector<std::size_t>& best_patch) {
  const std::size_t nq = query.rows();
  const std::size_t nd = doc.rows();
  const std::size_t dims = query.dims();
  best_patch.assign(nq, 0);

  switch (metric) {
    case Metric::kCosine:
    case Metric::kDotProduct: {
      const bool cosine = metric == Metric::kCosine;
      best.assign(nq, -std::numeric_limits<double>::infinity());
      for (std::size_t j = 0; j < nd; ++j) {
        const float* d = doc.row(j).data();
        const double dn = doc.row_norm(j);
        for (std::size_t i = 0; i < nq; ++i) {
          double s;
          if (cosine) {
            const double qn = query.row_norm(i);
            s = (qn == 0.0 || dn == 0.0)
                    ? 0.0
                    : kernels::dot(query.row(i).data(), d, dims) / (qn * dn);
          } else {
            s = kernels::dot(query.row(i).data(), d, dims);
          }
          if (s > best[i]) {
            best[i] = s;
            best_patch[i] = j;
          }
        }
      }
      break;
    }
    case Metric::kEuclidean: {
      // Track the smallest squared distance; one sqrt per token at the end.
      best.assign(nq, std::numeric_limits<double>::infinity());
      for (std::size_t j = 0; j < nd; ++j) {
        const float* d = doc.row(j).data();
        for (std::size_t i = 0; i < nq; ++i) {
          const double s = kernels::squared_l2(query.row(i).data(), d, dims);
          if (s < best[i]) {
            best[i] = s;
            best_patch[i] = j;
          }
        }
      }
      for (double& b : best) b = -std::sqrt(b);
      break;
    }
    case Metric::kManhattan: {
      best.assign(nq, std::numeric_limits<double>::infinity());
      for (std::size_t j = 0; j < nd; ++j) {
        const float* d = doc.row(j).data();
        for (std::size_t i = 0; i < nq; ++i) {
          const double s = kernels::l1(query.row(i).data(), d, dims);
          if (s < best[i]) {
            best[i] = s;
            best_patch[i] = j;
          }
        }
      }
      for (double& b : best) b = -b;
      break;
    }
  }
}

}  // namespace

double maxsim_score(const MultiVector& query, const MultiVector& doc,
                    Metric metric) {
  check_dims(query, doc);
  std::vector<double> best;
  std::vector<std::size_t> patch;
  best_matches(query, doc, metric, best, patch);
  double total = 0.0;
  for (double b : best) total += b;
  return total;
}

ScoreExplanation maxsim_explain(const MultiVector& query, const MultiVector& doc,
                                Metric metric) {
  check_dims(query, doc);
  std::vector<double> best;
  std::vector<std::size_t> patch;
  best_matches(query, doc, metric, best, patch);
  ScoreExplanation out;
  out.per_token.reserve(best.size());
  for (std::size_t i = 0; i < best.size(); ++i) {
    out.per_token.push_back({i, patch[i], best[i]});
    out.total += best[i];
  }
  return out;
}

double oracle_score(const MultiVector& query, const MultiVector& doc,
                    Metric metric) {
  check_dims(query, doc);
  const std::size_t dims = query.dims();
  double total = 0.0;
  for (std::size_t i = 0; i < query.rows(); ++i) {
    const auto q = query.row(i);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < doc.rows(); ++j) {
      const auto d = doc.row(j);
      double s = 0.0;
      if (metric == Metric::kCosine) {
        double qd = 0.0, qq = 0.0, dd = 0.0;
        for (std::size_t k = 0; k < dims; ++k) {
          qd += static_cast<double>(q[k]) * static_cast<double>(d[k]);
          qq += static_cast<double>(q[k]) * static_cast<double>(q[k]);
          dd += static_cast<double>(d[k]) * static_cast<double>(d[k]);
        }
        s = (qq == 0.0 || dd == 0.0) ? 0.0 : qd / (std::sqrt(qq) * std::sqrt(dd));
      } else if (metric == Metric::kDotProduct) {
        for (std::size_t k = 0; k < dims; ++k) {
          s += static_cast<double>(q[k]) * static_cast<double>(d[k]);
        }
      } else if (metric == Metric::kEuclidean) {
        double sq = 0.0;
        for (std::size_t k = 0; k < dims; ++k) {
          const double diff = static_cast<double>(q[k]) - static_cast<double>(d[k]);
          sq += diff * diff;
        }
        s = -std::sqrt(sq);
      } else {
        double l1 = 0.0;
        for (std::size_t k = 0; k < dims; ++k) {
          l1 += std::fabs(static_cast<double>(q[k]) - static_cast<double>(d[k]));
        }
        s = -l1;
      }
      if (s > best) best = s;
    }
    total += best;
  }
  return total;
}

}  // namespace folio
