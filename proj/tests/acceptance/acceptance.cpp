// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails. Tolerances and sizes are fixed below.

#include <sys/resource.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <set>
#include <string>
#include <thread>

#include "folio/collection.hpp"
#include "folio/embedding_file.hpp"
#include "folio/embedding_service.hpp"
#include "folio/eval/benchmark.hpp"
#include "folio/eval/metrics.hpp"
#include "folio/eval/report.hpp"
#include "folio/eval/runner.hpp"
#include "folio/late_interaction.hpp"
#include "folio/mock_embedder.hpp"
#include "folio/synthetic.hpp"
#include "support/test_support.hpp"

namespace {

using namespace folio;
using Clock = std::chrono::steady_clock;

constexpr double kOracleRelTol = 1e-5;
constexpr std::size_t kOracleInstances = 1200;
constexpr double kOracleSeconds = 60;

constexpr std::size_t kRetrievalPages = 500;
constexpr std::size_t kRetrievalRows = 64;
constexpr std::size_t kRetrievalDims = 32;
constexpr std::size_t kRetrievalQueries = 50;
constexpr double kRetrievalSeconds = 120;

constexpr double kFormulaTol = 1e-5;
constexpr std::size_t kRandomRankings = 200;

constexpr double kProtocolSeconds = 600;
constexpr double kTailThreshold = 0.85;

constexpr std::size_t kScalePages = 3612;
constexpr std::size_t kScaleRows = 1030;
constexpr std::size_t kScaleDims = 128;
constexpr std::size_t kScaleQueryRows = 32;
constexpr double kScaleSeconds = 5.0;
constexpr double kScaleMemoryBytes = 3.0 * 1024 * 1024 * 1024;

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::cout << (ok ? "PASS " : "FAIL ") << name << " | " << detail << std::endl;
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, const char* spec = "%.3g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

double rel_error(double a, double b) {
  if (a == b) return 0.0;
  return std::fabs(a - b) / std::max(std::fabs(a), std::fabs(b));
}

// Guards a criterion so an unexpected exception reports FAIL instead of
// aborting the remaining checks.
void run_criterion(const std::string& name, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(false, name, std::string("exception: ") + e.what());
  }
}

void oracle_equivalence() {
  const auto start = Clock::now();
  std::mt19937_64 gen(20240601);
  double worst = 0;
  std::size_t instances = 0, degenerate = 0, bad = 0;
  std::size_t per_metric[4] = {0, 0, 0, 0};
  for (std::size_t i = 0; i < kOracleInstances; ++i) {
    const Metric metric = kAllMetrics[i % 4];
    std::size_t qr = 1 + gen() % 24, dr = 1 + gen() % 96, dims = 1 + gen() % 160;
    const int shape = static_cast<int>(i % 10);
    if (shape == 0) qr = dr = 1;  // 1x1
    auto q = testing::random_matrix(gen, qr, dims, -2, 2);
    auto d = testing::random_matrix(gen, dr, dims, -2, 2);
    if (shape == 1 || shape == 2) {
      // Zero-norm rows in the query and the document.
      std::vector<float> qd(q.data().begin(), q.data().end());
      std::vector<float> dd(d.data().begin(), d.data().end());
      for (std::size_t c = 0; c < dims; ++c) qd[c] = 0.0f;
      for (std::size_t c = 0; c < dims; ++c) dd[(dr - 1) * dims + c] = 0.0f;
      if (shape == 2) std::fill(qd.begin(), qd.end(), 0.0f);
      q = MultiVector(qr, dims, qd);
      d = MultiVector(dr, dims, dd);
    }
    if (shape <= 2) ++degenerate;
    const double fast = maxsim_score(q, d, metric);
    const double oracle = oracle_score(q, d, metric);
    const double err = rel_error(fast, oracle);
    worst = std::max(worst, err);
    if (!(err <= kOracleRelTol)) ++bad;
    ++per_metric[i % 4];
    ++instances;
  }
  const double secs = seconds_since(start);
  const bool ok = bad == 0 && instances >= 1000 && secs < kOracleSeconds &&
                  per_metric[0] > 0 && per_metric[1] > 0 && per_metric[2] > 0 && per_metric[3] > 0;
  report(ok, "oracle-equivalence",
         std::to_string(instances) + " instances (" + std::to_string(degenerate) +
             " degenerate), max rel err " + fmt(worst) + " (tol " + fmt(kOracleRelTol) + "), " +
             fmt(secs, "%.2f") + " s (limit " + fmt(kOracleSeconds, "%.0f") + " s)");
}

SyntheticCorpus retrieval_corpus() {
  return make_synthetic_corpus({.pages = kRetrievalPages,
                                .page_rows = kRetrievalRows,
                                .dims = kRetrievalDims,
                                .seed = 7,
                                .volumes = 5,
                                .plant_near_duplicate = true});
}

void exact_retrieval(const SyntheticCorpus& corpus) {
  const auto start = Clock::now();
  const MockEmbedder embedder(corpus.embedder);
  std::mt19937_64 gen(77);
  // Half benchmark texts (self-matches, including the query whose answer
  // page is duplicated and so ties), half random matrices.
  std::vector<MultiVector> queries;
  for (const auto& q : corpus.queries) {
    if (q.id == corpus.planted_for) queries.push_back(embedder.embed_text(q.text));
  }
  while (queries.size() < kRetrievalQueries / 2) {
    queries.push_back(embedder.embed_text(corpus.queries[gen() % corpus.queries.size()].text));
  }
  while (queries.size() < kRetrievalQueries) {
    queries.push_back(testing::random_matrix(gen, 1 + gen() % 12, kRetrievalDims));
  }

  std::size_t checked = 0, mismatches = 0, ties = 0;
  double worst = 0;
  for (Metric metric : kAllMetrics) {
    Collection c("exact", metric, kRetrievalDims);
    c.upsert(corpus.pages);
    for (const auto& q : queries) {
      const auto result = c.search({{"q", q}, 5, 25});
      const auto oracle = testing::oracle_ranking(corpus.pages, q, metric);
      bool same = result.entries.size() == 5;
      for (std::size_t i = 0; same && i < 5; ++i) {
        same = result.entries[i].page == oracle[i].first;
        worst = std::max(worst, rel_error(result.entries[i].score, oracle[i].second));
        if (i > 0 && oracle[i].second == oracle[i - 1].second) ++ties;
      }
      if (!same) ++mismatches;
      ++checked;
    }
  }
  const double secs = seconds_since(start);
  const bool ok = mismatches == 0 && checked == kRetrievalQueries * 4 && worst <= kOracleRelTol &&
                  ties > 0 && secs < kRetrievalSeconds;
  report(ok, "exact-retrieval",
         std::to_string(checked) + " searches on " + std::to_string(corpus.pages.size()) +
             " pages, " + std::to_string(mismatches) + " top-5 mismatches, " +
             std::to_string(ties) + " tied pairs ordered, max score rel err " + fmt(worst) +
             ", " + fmt(secs, "%.2f") + " s (limit " + fmt(kRetrievalSeconds, "%.0f") + " s)");
}

void metric_formulas() {
  using namespace folio::eval;
  auto pages = [](std::initializer_list<std::uint32_t> ns) {
    std::vector<PageRef> out;
    for (auto n : ns) out.push_back({"v", n});
    return out;
  };
  auto set = [&](std::initializer_list<std::uint32_t> ns) {
    const auto v = pages(ns);
    return std::set<PageRef>(v.begin(), v.end());
  };
  const auto top5 = pages({1, 2, 3, 4, 5});
  std::vector<std::pair<std::string, std::pair<double, double>>> checks = {
      {"P@5 3/5", {precision_at_k(top5, set({1, 3, 5}), 5), 0.6}},
      {"R@5 2/8", {recall_at_k(top5, set({2, 4, 10, 11, 12, 13, 14, 15}), 5), 0.25}},
      {"F1@5", {f1_at_k(top5, set({2, 4, 10, 11, 12, 13, 14, 15}), 5), 0.30769}},
      {"AP@5", {average_precision(top5, set({1, 3, 8, 9}), 5), 0.41667}},
      {"MRR", {(reciprocal_rank(top5, set({1}), 5) + reciprocal_rank(top5, set({2}), 5) +
                reciprocal_rank(top5, set({9}), 5)) /
                   3,
               0.5}},
  };
  std::size_t hand_bad = 0;
  std::string hand_detail;
  for (const auto& [name, values] : checks) {
    if (!(std::fabs(values.first - values.second) <= kFormulaTol)) {
      ++hand_bad;
      hand_detail += " " + name + "=" + fmt(values.first, "%.6f");
    }
  }

  std::mt19937_64 gen(4242);
  std::size_t random_bad = 0;
  for (std::size_t t = 0; t < kRandomRankings; ++t) {
    const std::size_t k = 1 + gen() % 10;
    std::vector<std::uint32_t> ids(40);
    std::iota(ids.begin(), ids.end(), 1);
    std::shuffle(ids.begin(), ids.end(), gen);
    std::vector<PageRef> ranking;
    for (std::size_t i = 0, n = gen() % 20; i < n; ++i) ranking.push_back({"v", ids[i]});
    std::set<PageRef> relevant;
    for (std::size_t n = 1 + gen() % 10; relevant.size() < n;) {
      relevant.insert({"v", static_cast<std::uint32_t>(1 + gen() % 40)});
    }
    const auto m = evaluate_ranking(ranking, relevant, k);
    const auto r = testing::reference_metrics(ranking, relevant, k);
    const bool ok = std::fabs(m.precision - r.precision) <= kFormulaTol &&
                    std::fabs(m.recall - r.recall) <= kFormulaTol &&
                    std::fabs(m.f1 - r.f1) <= kFormulaTol &&
                    std::fabs(m.average_precision - r.ap) <= kFormulaTol &&
                    std::fabs(m.reciprocal_rank - r.rr) <= kFormulaTol;
    if (!ok) ++random_bad;
  }
  report(hand_bad == 0 && random_bad == 0, "metric-formulas",
         std::to_string(checks.size() - hand_bad) + "/" + std::to_string(checks.size()) +
             " worked examples within " + fmt(kFormulaTol) + hand_detail + ", " +
             std::to_string(kRandomRankings - random_bad) + "/" +
             std::to_string(kRandomRankings) + " random rankings match the reference");
}

void rank_invariances(const SyntheticCorpus& corpus) {
  const MockEmbedder embedder(corpus.embedder);
  std::vector<MultiVector> queries;
  for (std::size_t i = 0; i < corpus.queries.size(); i += 4) {
    queries.push_back(embedder.embed_text(corpus.queries[i].text));
  }

  // Cosine: every page rescaled by the same positive constant.
  Collection base("base", Metric::kCosine, kRetrievalDims);
  base.upsert(corpus.pages);
  std::vector<std::vector<PageRef>> reference;
  for (const auto& q : queries) reference.push_back(base.search_all(q).pages());
  std::size_t cosine_lists = 0, cosine_bad = 0;
  std::string bad_scales;
  for (float c : {0.5f, 2.0f, 3.0f, 10.0f, 0.01f}) {
    std::vector<PageEmbedding> scaled;
    for (const auto& p : corpus.pages) scaled.push_back({p.page, testing::scaled(p.embedding, c)});
    Collection s("scaled", Metric::kCosine, kRetrievalDims);
    s.upsert(std::move(scaled));
    for (std::size_t i = 0; i < queries.size(); ++i) {
      ++cosine_lists;
      if (s.search_all(queries[i]).pages() != reference[i]) {
        ++cosine_bad;
        bad_scales += " c=" + fmt(c);
      }
    }
  }

  // Dot: one positively scoring document scaled by c > 1 never drops.
  Collection dot("dot", Metric::kDotProduct, kRetrievalDims);
  dot.upsert(corpus.pages);
  std::mt19937_64 gen(5);
  std::size_t dot_trials = 0, dot_bad = 0, dot_rose = 0;
  for (const auto& q : queries) {
    for (int t = 0; t < 3; ++t) {
      const auto& target = corpus.pages[gen() % corpus.pages.size()];
      if (oracle_score(q, target.embedding, Metric::kDotProduct) <= 0) continue;
      const auto before = dot.search_all(q).pages();
      const auto rank_of = [&](const std::vector<PageRef>& r) {
        return std::find(r.begin(), r.end(), target.page) - r.begin();
      };
      for (float c : {1.5f, 4.0f}) {
        Collection moved("moved", Metric::kDotProduct, kRetrievalDims);
        moved.upsert(corpus.pages);
        moved.upsert({{target.page, testing::scaled(target.embedding, c)}});
        const auto after = moved.search_all(q).pages();
        ++dot_trials;
        if (rank_of(after) > rank_of(before)) ++dot_bad;
        if (rank_of(after) < rank_of(before)) ++dot_rose;
      }
    }
  }
  report(cosine_bad == 0 && dot_bad == 0 && dot_trials > 0, "rank-invariances",
         "cosine: " + std::to_string(cosine_lists - cosine_bad) + "/" +
             std::to_string(cosine_lists) + " full ranked lists unchanged under rescaling" +
             bad_scales + "; dot: " + std::to_string(dot_trials - dot_bad) + "/" +
             std::to_string(dot_trials) + " rescaled documents kept or improved rank (" +
             std::to_string(dot_rose) + " improved)");
}

void experiment_protocol() {
  const auto start = Clock::now();
  testing::TempDir dir;
  const auto corpus = retrieval_corpus();
  {
    std::ofstream b(dir / "benchmark.tsv");
    eval::write_benchmark(b, corpus.queries);
    std::ofstream g(dir / "ground_truth.tsv");
    eval::write_ground_truth(g, corpus.ground_truth);
  }
  write_embedding_file(dir / "pages.mve", corpus.pages);

  const auto queries = eval::load_benchmark(dir / "benchmark.tsv");
  const auto judgments = eval::load_ground_truth(dir / "ground_truth.tsv");
  const auto validation =
      eval::validate_benchmark(queries, judgments, eval::standard_category_counts());
  const eval::GroundTruth gt(judgments);
  const MockEmbedder embedder(corpus.embedder);
  const auto pages = read_embedding_file(dir / "pages.mve");

  std::vector<std::shared_ptr<Collection>> collections;
  for (Metric m : kAllMetrics) {
    collections.push_back(std::make_shared<Collection>(std::string(to_string(m)), m, kRetrievalDims));
    collections.back()->upsert(pages);
  }

  std::vector<std::string> problems;
  const auto expect = [&](bool cond, const std::string& what) {
    if (!cond) problems.push_back(what);
  };
  expect(validation.ok() && validation.total_queries == 75, "benchmark validation");

  // Experiment I: four reports with per-category tables.
  std::vector<eval::MetricsReport> full;
  for (const auto& c : collections) {
    full.push_back(eval::run_benchmark(*c, queries, gt, embedder, {.timestamp = "acceptance"}));
    std::ofstream out(dir / ("report-" + c->name() + ".txt"));
    eval::write_report_text(out, full.back());
  }
  expect(full.size() == 4, "four reports");
  for (const auto& r : full) {
    expect(r.per_query.size() == 75 && r.failures.empty(), "75 queries in " + r.collection);
    expect(r.per_category.size() == 7, "7 categories in " + r.collection);
  }
  const auto table_ok = [&](const std::string& text, const std::string& label) {
    std::istringstream in(text);
    std::vector<std::string> rows;
    for (std::string line; std::getline(in, line);) rows.push_back(line);
    const char* measures[] = {"Prec@5", "Recall@5", "F1@5", "AP", "MRR"};
    bool ok = rows.size() == 8 && rows[1].find("Metric") != std::string::npos;
    std::size_t pos = 0;
    for (const char* col : {"Cosine", "Dot", "Euclidean", "Manh"}) {
      pos = ok ? rows[1].find(col, pos) : std::string::npos;
      ok = ok && pos != std::string::npos;
    }
    for (int i = 0; ok && i < 5; ++i) {
      ok = rows[3 + i].rfind("| " + std::string(measures[i]) + " ", 0) == 0 &&
           std::count(rows[3 + i].begin(), rows[3 + i].end(), '|') == 6 &&
           rows[3 + i].find(" - ") == std::string::npos;
    }
    expect(ok, "table shape: " + label);
  };
  {
    std::ostringstream overall;
    eval::write_comparison_table(overall, full, "Benchmark comparison across similarity functions");
    table_ok(overall.str(), "overall");
    for (auto category : eval::kAllCategories) {
      std::ostringstream t;
      eval::write_comparison_table(t, full, std::string(eval::display_name(category)), category);
      table_ok(t.str(), std::string(eval::display_name(category)));
    }
  }

  // Experiments II and III: subset runs.
  std::vector<eval::MetricsReport> multi, conceptual;
  for (const auto& c : collections) {
    multi.push_back(eval::run_benchmark(*c, queries, gt, embedder, {.subset = eval::Category::kMultiPage}));
    conceptual.push_back(
        eval::run_benchmark(*c, queries, gt, embedder, {.subset = eval::Category::kConceptual}));
    expect(multi.back().per_query.size() == 14, "multi-page subset size");
    expect(conceptual.back().per_query.size() == 13, "conceptual subset size");
  }
  {
    std::ostringstream t2, t3;
    eval::write_comparison_table(t2, multi, "Multi-Page");
    eval::write_comparison_table(t3, conceptual, "Conceptual");
    table_ok(t2.str(), "multi-page subset");
    table_ok(t3.str(), "conceptual subset");
  }

  // Experiment IV: unbounded analysis under cosine.
  const auto tail = eval::unbounded_analysis(*collections[0], queries, gt, embedder, kTailThreshold);
  eval::write_tail_report(dir / "tail", tail);
  bool planted_found = false;
  double planted_score = 0;
  for (const auto& c : tail.candidates) {
    if (c.page == corpus.planted.at(0) && c.query_id == corpus.planted_for) {
      planted_found = true;
      planted_score = c.normalized_score;
    }
  }
  expect(planted_found, "planted duplicate flagged");
  expect(tail.curves.size() == 75 && std::filesystem::exists(dir / "tail" / "candidates.tsv"),
         "tail report files");

  const double secs = seconds_since(start);
  expect(secs < kProtocolSeconds, "runtime");
  std::string detail = "4 reports x 75 queries, 8 comparison tables per run set, subsets " +
                       std::to_string(multi[0].per_query.size()) + "/" +
                       std::to_string(conceptual[0].per_query.size()) + ", planted " +
                       to_string(corpus.planted.at(0)) + " flagged for " + corpus.planted_for +
                       " at " + fmt(planted_score, "%.4f") + " > " + fmt(kTailThreshold) + " (" +
                       std::to_string(tail.affected_queries) + " affected queries), " +
                       fmt(secs, "%.2f") + " s";
  for (const auto& p : problems) detail += "; problem: " + p;
  report(problems.empty(), "experiment-protocol", detail);
}

void self_match_end_to_end() {
  auto corpus = make_synthetic_corpus({.pages = kRetrievalPages,
                                       .page_rows = kRetrievalRows,
                                       .dims = kRetrievalDims,
                                       .plant_near_duplicate = false});
  testing::TempDir dir;
  write_embedding_file(dir / "pages.mve", corpus.pages);
  const auto pages = read_embedding_file(dir / "pages.mve");

  // Queries are embedded over HTTP by the mock model server.
  auto mock = std::make_shared<MockEmbedder>(corpus.embedder);
  EmbeddingServiceServer server(mock);
  const int port = server.start();
  HttpEmbedder http({.endpoint = "http://127.0.0.1:" + std::to_string(port)});

  std::vector<eval::GroundTruthEntry> sole;
  for (std::size_t i = 0; i < corpus.queries.size(); ++i) {
    sole.push_back({corpus.queries[i].id, corpus.answer_pages[i], true});
  }
  const eval::GroundTruth gt(sole);
  std::string detail;
  bool ok = true;
  for (Metric m : kAllMetrics) {
    Collection c(std::string(to_string(m)), m, kRetrievalDims);
    c.upsert(pages);
    const auto r = eval::run_benchmark(c, corpus.queries, gt, http);
    std::size_t rank1 = 0;
    for (std::size_t i = 0; i < r.per_query.size(); ++i) {
      if (r.per_query[i].retrieved.at(0) == corpus.answer_pages[i]) ++rank1;
    }
    const bool metric_ok = r.failures.empty() && rank1 == corpus.queries.size() &&
                           std::fabs(r.overall.precision - 0.2) <= 1e-12 &&
                           std::fabs(r.overall.mrr - 1.0) <= 1e-12;
    ok = ok && metric_ok;
    detail += std::string(to_string(m)) + " rank1 " + std::to_string(rank1) + "/" +
              std::to_string(corpus.queries.size()) + " P@5 " + fmt(r.overall.precision, "%.3f") +
              " MRR " + fmt(r.overall.mrr, "%.3f") + "; ";
  }
  server.stop();
  report(ok, "self-match-e2e", detail);
}

double peak_rss_bytes() {
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  return static_cast<double>(usage.ru_maxrss) * 1024.0;  // KiB on Linux
}

void scale_check() {
  const auto build_start = Clock::now();
  Collection c("scale", Metric::kCosine, kScaleDims);
  // Upsert in batches so only one batch of matrices is ever held twice.
  constexpr std::size_t kBatch = 256;
  std::mt19937_64 gen(3612);
  std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
  for (std::size_t begin = 0; begin < kScalePages; begin += kBatch) {
    std::vector<PageEmbedding> batch;
    for (std::size_t i = begin; i < std::min(kScalePages, begin + kBatch); ++i) {
      std::vector<float> data(kScaleRows * kScaleDims);
      for (auto& v : data) v = dist(gen);
      batch.push_back({{"scale" + std::to_string(i / 400), static_cast<std::uint32_t>(i % 400 + 1)},
                       MultiVector(kScaleRows, kScaleDims, std::move(data))});
    }
    c.upsert(std::move(batch));
  }
  const double build_secs = seconds_since(build_start);
  const auto query = testing::random_matrix(gen, kScaleQueryRows, kScaleDims);

  const auto start = Clock::now();
  const auto result = c.search({{"q", query}, 5, 25});
  const double secs = seconds_since(start);
  const double rss = peak_rss_bytes();
  const unsigned cores = std::max(1u, std::thread::hardware_concurrency());

  const bool ok = c.size() == kScalePages && result.entries.size() == 5 && secs < kScaleSeconds &&
                  rss < kScaleMemoryBytes;
  report(ok, "scale-check",
         std::to_string(c.size()) + " pages of " + std::to_string(kScaleRows) + "x" +
             std::to_string(kScaleDims) + ", " + std::to_string(kScaleQueryRows) +
             "-row cosine query in " + fmt(secs, "%.2f") + " s (limit " + fmt(kScaleSeconds, "%.0f") +
             " s) on " + std::to_string(cores) + " hardware thread(s), peak RSS " +
             fmt(rss / (1024.0 * 1024 * 1024), "%.2f") + " GiB (limit 3 GiB), build " +
             fmt(build_secs, "%.1f") + " s");
}

}  // namespace

int main() {
  std::cout << "folio acceptance" << std::endl;
  run_criterion("oracle-equivalence", oracle_equivalence);
  const auto corpus = retrieval_corpus();
  run_criterion("exact-retrieval", [&] { exact_retrieval(corpus); });
  run_criterion("metric-formulas", metric_formulas);
  run_criterion("rank-invariances", [&] { rank_invariances(corpus); });
  run_criterion("experiment-protocol", experiment_protocol);
  run_criterion("self-match-e2e", self_match_end_to_end);
  run_criterion("scale-check", scale_check);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
