#include "folio/eval/report.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "folio/error.hpp"
#include "json_codec.hpp"

namespace folio {

nlohmann::json to_json(const PageRef& page) {
  return {{"volume_id", page.volume_id}, {"page_number", page.page_number}};
}

nlohmann::json to_json(const ScoreExplanation& explanation) {
  nlohmann::json tokens = nlohmann::json::array();
  for (const auto& t : explanation.per_token) {
    tokens.push_back({{"token", t.token}, {"patch", t.patch}, {"similarity", t.similarity}});
  }
  return {{"total", explanation.total}, {"per_token", std::move(tokens)}};
}

}  // namespace folio

namespace folio::eval {

namespace {

std::string fixed(double v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

void write_aggregate_row(std::ostream& out, const std::string& label,
                         const MetricAggregate& a) {
  out << pad(label, 14) << pad(std::to_string(a.queries), 6)
      << pad(fixed(a.precision, 4), 9) << pad(fixed(a.recall, 4), 9)
      << pad(fixed(a.f1, 4), 9) << pad(fixed(a.average_precision, 4), 9)
      << fixed(a.mrr, 4) << '\n';
}

}  // namespace

nlohmann::json to_json(const MetricAggregate& a) {
  return {{"queries", a.queries},
          {"precision_at_k", a.precision},
          {"recall_at_k", a.recall},
          {"f1_at_k", a.f1},
          {"average_precision", a.average_precision},
          {"mrr", a.mrr}};
}

nlohmann::json to_json(const MetricsReport& r) {
  nlohmann::json per_query = nlohmann::json::array();
  for (const auto& o : r.per_query) {
    nlohmann::json retrieved = nlohmann::json::array();
    for (std::size_t i = 0; i < o.retrieved.size(); ++i) {
      auto page = to_json(o.retrieved[i]);
      page["score"] = o.scores.at(i);
      retrieved.push_back(std::move(page));
    }
    per_query.push_back({{"query_id", o.query_id},
                         {"category", to_string(o.category)},
                         {"precision_at_k", o.metrics.precision},
                         {"recall_at_k", o.metrics.recall},
                         {"f1_at_k", o.metrics.f1},
                         {"average_precision", o.metrics.average_precision},
                         {"reciprocal_rank", o.metrics.reciprocal_rank},
                         {"retrieved", std::move(retrieved)}});
  }
  nlohmann::json per_category = nlohmann::json::object();
  for (const auto& [category, a] : r.per_category) {
    per_category[std::string(to_string(category))] = to_json(a);
  }
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& [id, reason] : r.failures) {
    failures.push_back({{"query_id", id}, {"reason", reason}});
  }
  return {{"metadata",
           {{"collection", r.collection},
            {"metric", to_string(r.metric)},
            {"k", r.k},
            {"candidates", r.candidates},
            {"subset", r.subset},
            {"timestamp", r.timestamp},
            {"average_precision_variant", "AP@k normalized by min(|relevant|, k)"}}},
          {"per_query", std::move(per_query)},
          {"per_category", std::move(per_category)},
          {"overall", to_json(r.overall)},
          {"failures", std::move(failures)},
          {"warnings", r.warnings}};
}

nlohmann::json to_json(const TailReport& r) {
  nlohmann::json curves = nlohmann::json::array();
  for (const auto& c : r.curves) {
    curves.push_back({{"query_id", c.query_id}, {"normalized_scores", c.normalized_scores}});
  }
  nlohmann::json candidates = nlohmann::json::array();
  for (const auto& c : r.candidates) {
    auto j = to_json(c.page);
    j["query_id"] = c.query_id;
    j["rank"] = c.rank;
    j["score"] = c.score;
    j["normalized_score"] = c.normalized_score;
    candidates.push_back(std::move(j));
  }
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& [id, reason] : r.failures) {
    failures.push_back({{"query_id", id}, {"reason", reason}});
  }
  return {{"metadata",
           {{"collection", r.collection},
            {"metric", to_string(r.metric)},
            {"threshold", r.threshold},
            {"timestamp", r.timestamp}}},
          {"total_queries", r.total_queries},
          {"affected_queries", r.affected_queries},
          {"candidates", std::move(candidates)},
          {"curves", std::move(curves)},
          {"failures", std::move(failures)}};
}

void write_report_text(std::ostream& out, const MetricsReport& r) {
  const std::string k = std::to_string(r.k);
  out << "# Retrieval benchmark report\n"
      << "collection: " << r.collection << '\n'
      << "metric: " << to_string(r.metric) << '\n'
      << "k: " << r.k << '\n'
      << "candidates: " << r.candidates << '\n'
      << "subset: " << r.subset << '\n'
      << "timestamp: " << r.timestamp << '\n'
      << "queries: " << r.per_query.size() << " evaluated, " << r.failures.size()
      << " failed\n"
      << "note: AP is AP@" << k << ", normalized by min(|relevant|, " << k << ")\n\n";

  out << "## Per-query\n"
      << pad("query", 10) << pad("category", 13) << pad("P@" + k, 9)
      << pad("R@" + k, 9) << pad("F1@" + k, 9) << pad("AP@" + k, 9) << "RR\n";
  for (const auto& o : r.per_query) {
    out << pad(o.query_id, 10) << pad(std::string(to_string(o.category)), 13)
        << pad(fixed(o.metrics.precision, 4), 9) << pad(fixed(o.metrics.recall, 4), 9)
        << pad(fixed(o.metrics.f1, 4), 9)
        << pad(fixed(o.metrics.average_precision, 4), 9)
        << fixed(o.metrics.reciprocal_rank, 4) << '\n';
  }

  const std::string header = pad("", 14) + pad("n", 6) + pad("P@" + k, 9) +
                             pad("R@" + k, 9) + pad("F1@" + k, 9) +
                             pad("AP@" + k, 9) + "MRR\n";
  out << "\n## Per-category\n" << header;
  for (const auto& [category, a] : r.per_category) {
    write_aggregate_row(out, std::string(display_name(category)), a);
  }
  out << "\n## Overall\n" << header;
  write_aggregate_row(out, "all", r.overall);

  if (!r.failures.empty()) {
    out << "\n## Failures\n";
    for (const auto& [id, reason] : r.failures) out << id << ": " << reason << '\n';
  }
  if (!r.warnings.empty()) {
    out << "\n## Warnings\n";
    for (const auto& w : r.warnings) out << w << '\n';
  }
}

std::string report_json(const MetricsReport& report) {
  return to_json(report).dump(2);
}

void write_comparison_table(std::ostream& out, std::span<const MetricsReport> reports,
                            std::string_view title, std::optional<Category> category) {
  const std::size_t k = reports.empty() ? 5 : reports.front().k;
  const std::string ks = std::to_string(k);
  out << title << '\n';
  out << "| " << pad("Metric", 10);
  for (const auto& r : reports) out << " | " << pad(std::string(display_name(r.metric)), 9);
  out << " |\n|" << std::string(12, '-');
  for (std::size_t i = 0; i < reports.size(); ++i) out << '|' << std::string(11, '-');
  out << "|\n";

  const std::pair<std::string, double MetricAggregate::*> rows[] = {
      {"Prec@" + ks, &MetricAggregate::precision},
      {"Recall@" + ks, &MetricAggregate::recall},
      {"F1@" + ks, &MetricAggregate::f1},
      {"AP", &MetricAggregate::average_precision},
      {"MRR", &MetricAggregate::mrr},
  };
  for (const auto& [label, field] : rows) {
    out << "| " << pad(label, 10);
    for (const auto& r : reports) {
      std::string cell = "-";
      if (!category) {
        cell = fixed(r.overall.*field, 3);
      } else if (auto it = r.per_category.find(*category); it != r.per_category.end()) {
        cell = fixed(it->second.*field, 3);
      }
      out << " | " << pad(cell, 9);
    }
    out << " |\n";
  }
}

void write_tail_report(const std::filesystem::path& dir, const TailReport& r) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir / "curves", ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + (dir / "curves").string());

  for (const auto& c : r.curves) {
    std::ofstream out(dir / "curves" / (c.query_id + ".tsv"));
    out << "rank\tnormalized_score\n";
    for (std::size_t i = 0; i < c.normalized_scores.size(); ++i) {
      out << (i + 1) << '\t' << fixed(c.normalized_scores[i], 6) << '\n';
    }
    if (!out) throw Error(ErrorCode::kIo, "cannot write curve for " + c.query_id);
  }
  {
    std::ofstream out(dir / "candidates.tsv");
    out << "query_id\tvolume_id\tpage_number\trank\tscore\tnormalized_score\n";
    for (const auto& c : r.candidates) {
      out << c.query_id << '\t' << c.page.volume_id << '\t' << c.page.page_number << '\t'
          << c.rank << '\t' << fixed(c.score, 6) << '\t' << fixed(c.normalized_score, 6)
          << '\n';
    }
    if (!out) throw Error(ErrorCode::kIo, "cannot write candidates.tsv");
  }
  std::ofstream out(dir / "summary.txt");
  out << "collection: " << r.collection << '\n'
      << "metric: " << to_string(r.metric) << '\n'
      << "threshold: " << r.threshold << '\n'
      << "timestamp: " << r.timestamp << '\n'
      << "queries: " << r.total_queries << '\n'
      << "queries with relevant-but-unlabeled candidates: " << r.affected_queries << '\n'
      << "candidates: " << r.candidates.size() << '\n';
  for (const auto& [id, reason] : r.failures) out << "failed " << id << ": " << reason << '\n';
}

std::string tail_report_json(const TailReport& report) {
  return to_json(report).dump(2);
}

}  // namespace folio::eval
