#include "folio/eval/runner.hpp"

#include "folio/error.hpp"

namespace folio::eval {

namespace {

std::vector<const BenchmarkQuery*> select(std::span<const BenchmarkQuery> queries,
                                          const std::optional<Category>& subset) {
  std::vector<const BenchmarkQuery*> out;
  for (const auto& q : queries) {
    if (!subset || q.category == *subset) out.push_back(&q);
  }
  return out;
}

}  // namespace

MetricAggregate aggregate(std::span<const QueryOutcome> outcomes) {
  MetricAggregate a;
  a.queries = outcomes.size();
  if (outcomes.empty()) return a;
  for (const auto& o : outcomes) {
    a.precision += o.metrics.precision;
    a.recall += o.metrics.recall;
    a.f1 += o.metrics.f1;
    a.average_precision += o.metrics.average_precision;
    a.mrr += o.metrics.reciprocal_rank;
  }
  const double n = static_cast<double>(outcomes.size());
  a.precision /= n;
  a.recall /= n;
  a.f1 /= n;
  a.average_precision /= n;
  a.mrr /= n;
  return a;
}

MetricsReport run_benchmark(const Collection& collection,
                            std::span<const BenchmarkQuery> queries,
                            const GroundTruth& ground_truth,
                            const Embedder& embedder, const RunOptions& options) {
  MetricsReport report;
  report.collection = collection.name();
  report.metric = collection.metric();
  report.k = options.k;
  report.candidates = options.candidates;
  report.subset = options.subset ? std::string(to_string(*options.subset)) : "all";
  report.timestamp = options.timestamp;

  const auto selected = select(queries, options.subset);
  if (selected.empty()) {
    report.warnings.push_back("no queries match subset '" + report.subset + "'");
  }

  std::size_t done = 0;
  for (const BenchmarkQuery* q : selected) {
    try {
      const auto& relevant = ground_truth.relevant(q->id);
      if (relevant.empty()) {
        throw Error(ErrorCode::kUndefinedRecall, "no relevant pages in ground truth");
      }
      SearchRequest request{embed_query(q->text, embedder, q->id), options.k,
                            options.candidates, false};
      const RankedResult result = collection.search(request);
      QueryOutcome outcome;
      outcome.query_id = q->id;
      outcome.category = q->category;
      outcome.retrieved = result.pages();
      for (const auto& e : result.entries) outcome.scores.push_back(e.score);
      outcome.metrics = evaluate_ranking(outcome.retrieved, relevant, options.k);
      report.per_query.push_back(std::move(outcome));
    } catch (const std::exception& e) {
      report.failures.emplace_back(q->id, e.what());
    }
    if (options.progress) options.progress(++done, selected.size());
  }

  report.overall = aggregate(report.per_query);
  std::map<Category, std::vector<QueryOutcome>> grouped;
  for (const auto& o : report.per_query) grouped[o.category].push_back(o);
  for (const auto& [category, outcomes] : grouped) {
    report.per_category[category] = aggregate(outcomes);
  }
  return report;
}

TailReport unbounded_analysis(const Collection& collection,
                              std::span<const BenchmarkQuery> queries,
                              const GroundTruth& ground_truth,
                              const Embedder& embedder, double threshold,
                              const RunOptions& options) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::kValidation, "threshold must lie in (0, 1]");
  }
  TailReport report;
  report.collection = collection.name();
  report.metric = collection.metric();
  report.threshold = threshold;
  report.timestamp = options.timestamp;

  const auto selected = select(queries, options.subset);
  report.total_queries = selected.size();
  std::size_t done = 0;
  for (const BenchmarkQuery* q : selected) {
    try {
      const auto query = embed_query(q->text, embedder, q->id);
      const RankedResult ranking = collection.search_all(query.embedding);
      const auto& labelled = ground_truth.relevant(q->id);
      TailCurve curve{q->id, {}};
      curve.normalized_scores.reserve(ranking.entries.size());
      bool affected = false;
      for (const auto& e : ranking.entries) {
        curve.normalized_scores.push_back(e.normalized_score);
        if (e.normalized_score > threshold && !labelled.contains(e.page)) {
          report.candidates.push_back({q->id, e.page, e.rank, e.score, e.normalized_score});
          affected = true;
        }
      }
      report.curves.push_back(std::move(curve));
      if (affected) ++report.affected_queries;
    } catch (const std::exception& e) {
      report.failures.emplace_back(q->id, e.what());
    }
    if (options.progress) options.progress(++done, selected.size());
  }
  return report;
}

}  // namespace folio::eval
