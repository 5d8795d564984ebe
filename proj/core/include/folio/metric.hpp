#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>

namespace folio {

enum class Metric { kCosine, kDotProduct, kEuclidean, kManhattan };

inline constexpr std::array<Metric, 4> kAllMetrics = {
    Metric::kCosine, Metric::kDotProduct, Metric::kEuclidean,
    Metric::kManhattan};

// Wire names: "cosine" | "dot" | "euclidean" | "manhattan".
std::string_view to_string(Metric metric) noexcept;
// Column heading used in comparison tables.
std::string_view display_name(Metric metric) noexcept;
std::optional<Metric> try_parse_metric(std::string_view name) noexcept;
// Throws Error(kValidation) listing the legal names.
Metric parse_metric(std::string_view name);

// All reductions accumulate in double. Each throws Error(kDimensionMismatch)
// when the lengths differ or are zero.

// Returns 0 when either input has zero norm.
double cosine_sim(std::span<const float> a, std::span<const float> b);
double dot_sim(std::span<const float> a, std::span<const float> b);
double euclidean_dist(std::span<const float> a, std::span<const float> b);
double manhattan_dist(std::span<const float> a, std::span<const float> b);

// Higher is better for every metric: cosine and dot pass through, the two
// distances are negated.
double similarity(Metric metric, std::span<const float> a,
                  std::span<const float> b);

}  // namespace folio
