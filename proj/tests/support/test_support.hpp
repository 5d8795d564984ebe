#pragma once

// Helpers shared by the unit tests and the acceptance binary. Oracles here
// deliberately avoid the library's own scoring and metric code.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>
#include <unistd.h>

#include "folio/collection.hpp"
#include "folio/embedding.hpp"
#include "folio/late_interaction.hpp"
#include "folio/metric.hpp"

namespace folio::testing {

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("folio-test-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline MultiVector random_matrix(std::mt19937_64& gen, std::size_t rows,
                                 std::size_t dims, float lo = -1.0f,
                                 float hi = 1.0f) {
  std::uniform_real_distribution<float> dist(lo, hi);
  std::vector<float> data(rows * dims);
  for (auto& v : data) v = dist(gen);
  return MultiVector(rows, dims, std::move(data));
}

inline MultiVector scaled(const MultiVector& m, float c) {
  std::vector<float> data(m.data().begin(), m.data().end());
  for (auto& v : data) v *= c;
  return MultiVector(m.rows(), m.dims(), std::move(data));
}

// Straight-loop per-pair similarity, higher is better.
inline double reference_similarity(Metric metric, std::span<const float> a,
                                   std::span<const float> b) {
  double dot = 0, na = 0, nb = 0, l2 = 0, l1 = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a[i], y = b[i];
    dot += x * y;
    na += x * x;
    nb += y * y;
    l2 += (x - y) * (x - y);
    l1 += std::fabs(x - y);
  }
  switch (metric) {
    case Metric::kCosine:
      return na == 0 || nb == 0 ? 0.0 : dot / (std::sqrt(na) * std::sqrt(nb));
    case Metric::kDotProduct:
      return dot;
    case Metric::kEuclidean:
      return -std::sqrt(l2);
    case Metric::kManhattan:
      return -l1;
  }
  return 0.0;
}

inline double reference_maxsim(const MultiVector& q, const MultiVector& d,
                               Metric metric) {
  double total = 0;
  for (std::size_t i = 0; i < q.rows(); ++i) {
    double best = -INFINITY;
    for (std::size_t j = 0; j < d.rows(); ++j) {
      best = std::max(best, reference_similarity(metric, q.row(i), d.row(j)));
    }
    total += best;
  }
  return total;
}

// Full ranking by a brute-force scan: score descending, PageRef ascending.
inline std::vector<std::pair<PageRef, double>> oracle_ranking(
    std::span<const PageEmbedding> pages, const MultiVector& query, Metric metric) {
  std::vector<std::pair<PageRef, double>> scored;
  for (const auto& p : pages) {
    scored.emplace_back(p.page, oracle_score(query, p.embedding, metric));
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return scored;
}

// Independent scalar metric definitions over a ranked list.
struct ReferenceMetrics {
  double precision, recall, f1, ap, rr;
};

inline ReferenceMetrics reference_metrics(const std::vector<PageRef>& ranking,
                                          const std::set<PageRef>& relevant,
                                          std::size_t k) {
  ReferenceMetrics m{0, 0, 0, 0, 0};
  int hits = 0;
  double prec_sum = 0;
  const std::size_t n = std::min(k, ranking.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (relevant.count(ranking[i]) == 1) {
      ++hits;
      prec_sum += static_cast<double>(hits) / static_cast<double>(i + 1);
      if (m.rr == 0) m.rr = 1.0 / static_cast<double>(i + 1);
    }
  }
  m.precision = hits / static_cast<double>(k);
  m.recall = hits / static_cast<double>(relevant.size());
  m.f1 = m.precision + m.recall == 0
             ? 0
             : 2 * m.precision * m.recall / (m.precision + m.recall);
  m.ap = prec_sum / static_cast<double>(std::min(relevant.size(), k));
  return m;
}

inline bool close_rel(double a, double b, double rel) {
  const double scale = std::max({std::fabs(a), std::fabs(b), 1.0});
  return std::fabs(a - b) <= rel * scale;
}

}  // namespace folio::testing
