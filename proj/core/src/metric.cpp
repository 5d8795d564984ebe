#include "folio/metric.hpp"

#include <cmath>
#include <string>

#include "folio/error.hpp"
#include "kernels.hpp"

namespace folio {

namespace {

void check_lengths(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size() || a.empty()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "vector lengths " + std::to_string(a.size()) + " and " +
                    std::to_string(b.size()) + " are not comparable");
  }
}

}  // namespace

std::string_view to_string(Metric metric) noexcept {
  switch (metric) {
    case Metric::kCosine:
      return "cosine";
    case Metric::kDotProduct:
      return "dot";
    case Metric::kEuclidean:
      return "euclidean";
    case Metric::kManhattan:
      return "manhattan";
  }
  return "cosine";
}

std::string_view display_name(Metric metric) noexcept {
  switch (metric) {
    case Metric::kCosine:
      return "Cosine";
    case Metric::kDotProduct:
      return "Dot";
    case Metric::kEuclidean:
      return "Euclidean";
    case Metric::kManhattan:
      return "Manh";
  }
  return "Cosine";
}

std::optional<Metric> try_parse_metric(std::string_view name) noexcept {
  for (Metric m : kAllMetrics) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

Metric parse_metric(std::string_view name) {
  if (auto m = try_parse_metric(name)) return *m;
  throw Error(ErrorCode::kValidation,
              "unknown metric '" + std::string(name) +
                  "'; expected one of: cosine, dot, euclidean, manhattan");
}

double cosine_sim(std::span<const float> a, std::span<const float> b) {
  check_lengths(a, b);
  const double na = std::sqrt(kernels::dot(a.data(), a.data(), a.size()));
  const double nb = std::sqrt(kernels::dot(b.data(), b.data(), b.size()));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return kernels::dot(a.data(), b.data(), a.size()) / (na * nb);
}

double dot_sim(std::span<const float> a, std::span<const float> b) {
  check_lengths(a, b);
  return kernels::dot(a.data(), b.data(), a.size());
}

double euclidean_dist(std::span<const float> a, std::span<const float> b) {
  check_lengths(a, b);
  return std::sqrt(kernels::squared_l2(a.data(), b.data(), a.size()));
}

double manhattan_dist(std::span<const float> a, std::span<const float> b) {
  check_lengths(a, b);
  return kernels::l1(a.data(), b.data(), a.size());
}

double similarity(Metric metric, std::span<const float> a,
                  std::span<const float> b) {
  switch (metric) {
    case Metric::kCosine:
      return cosine_sim(a, b);
    case Metric::kDotProduct:
      return dot_sim(a, b);
    case Metric::kEuclidean:
      return -euclidean_dist(a, b);
    case Metric::kManhattan:
      return -manhattan_dist(a, b);
  }
  return 0.0;
}

}  // namespace folio
