#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "folio/collection.hpp"
#include "folio/embedder.hpp"
#include "folio/eval/benchmark.hpp"
#include "folio/eval/metrics.hpp"

namespace folio::eval {

struct RunOptions {
  std::size_t k = 5;
  std::size_t candidates = 25;
  std::optional<Category> subset;  // nullopt runs every query
  std::string timestamp;           // copied into the report metadata
  // Called after each query with (completed, total).
  std::function<void(std::size_t, std::size_t)> progress;
};

struct QueryOutcome {
  std::string query_id;
  Category category = Category::kTextual;
  QueryMetrics metrics;
  std::vector<PageRef> retrieved;
  std::vector<double> scores;
};

struct MetricAggregate {
  std::size_t queries = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double average_precision = 0.0;
  double mrr = 0.0;
};

struct MetricsReport {
  std::string collection;
  Metric metric = Metric::kCosine;
  std::size_t k = 5;
  std::size_t candidates = 25;
  std::string subset = "all";
  std::string timestamp;
  std::vector<QueryOutcome> per_query;  // benchmark order
  std::vector<std::pair<std::string, std::string>> failures;  // id, reason
  std::map<Category, MetricAggregate> per_category;
  MetricAggregate overall;
  std::vector<std::string> warnings;
};

// Arithmetic means over the given outcomes.
MetricAggregate aggregate(std::span<const QueryOutcome> outcomes);

// Embeds, searches and scores every selected query. A query that fails (no
// relevant pages, embedder error, dims mismatch) is listed under failures
// and the run continues.
MetricsReport run_benchmark(const Collection& collection,
                            std::span<const BenchmarkQuery> queries,
                            const GroundTruth& ground_truth,
                            const Embedder& embedder,
                            const RunOptions& options = {});

struct TailCandidate {
  std::string query_id;
  PageRef page;
  std::size_t rank = 0;
  double score = 0.0;
  double normalized_score = 0.0;
};

struct TailCurve {
  std::string query_id;
  std::vector<double> normalized_scores;  // index i holds rank i + 1
};

struct TailReport {
  std::string collection;
  Metric metric = Metric::kCosine;
  double threshold = 0.85;
  std::string timestamp;
  std::size_t total_queries = 0;
  std::size_t affected_queries = 0;  // queries with at least one candidate
  std::vector<TailCurve> curves;
  std::vector<TailCandidate> candidates;  // unlabeled pages above threshold
  std::vector<std::pair<std::string, std::string>> failures;
};

// Ranks the whole collection per query and lists pages outside the ground
// truth whose normalized score exceeds `threshold`. Throws kValidation for a
// threshold outside (0, 1].
TailReport unbounded_analysis(const Collection& collection,
                              std::span<const BenchmarkQuery> queries,
                              const GroundTruth& ground_truth,
                              const Embedder& embedder, double threshold = 0.85,
                              const RunOptions& options = {});

}  // namespace folio::eval
