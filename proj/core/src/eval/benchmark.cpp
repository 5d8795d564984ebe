#include "folio/eval/benchmark.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>

#include "folio/error.hpp"

namespace folio::eval {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

bool skip_line(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line.empty() || line.front() == '#';
}

Error line_error(std::size_t lineno, const std::string& message) {
  return Error(ErrorCode::kFormat, "line " + std::to_string(lineno) + ": " + message);
}

}  // namespace

std::string_view to_string(Category category) noexcept {
  switch (category) {
    case Category::kVisual: return "Visual";
    case Category::kTextual: return "Textual";
    case Category::kMultiModal: return "MultiModal";
    case Category::kTabular: return "Tabular";
    case Category::kNumerical: return "Numerical";
    case Category::kMultiPage: return "MultiPage";
    case Category::kConceptual: return "Conceptual";
  }
  return "Textual";
}

std::string_view display_name(Category category) noexcept {
  switch (category) {
    case Category::kMultiModal: return "Multi-Modal";
    case Category::kMultiPage: return "Multi-Page";
    default: return to_string(category);
  }
}

std::string_view id_prefix(Category category) noexcept {
  switch (category) {
    case Category::kVisual: return "VI";
    case Category::kTextual: return "TX";
    case Category::kMultiModal: return "MM";
    case Category::kTabular: return "TB";
    case Category::kNumerical: return "NU";
    case Category::kMultiPage: return "MP";
    case Category::kConceptual: return "CP";
  }
  return "TX";
}

std::optional<Category> try_parse_category(std::string_view name) noexcept {
  std::string folded;
  for (char c : name) {
    if (c == '-' || c == '_' || c == ' ') continue;
    folded.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  for (Category c : kAllCategories) {
    std::string candidate;
    for (char ch : to_string(c)) {
      candidate.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
    if (candidate == folded) return c;
  }
  return std::nullopt;
}

std::vector<BenchmarkQuery> parse_benchmark(std::istream& in) {
  std::vector<BenchmarkQuery> queries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skip_line(line)) continue;
    auto fields = split_tabs(line);
    if (fields.size() != 3) {
      throw line_error(lineno, "expected id<TAB>category<TAB>text");
    }
    const auto category = try_parse_category(fields[1]);
    if (!category) throw line_error(lineno, "unknown category '" + fields[1] + "'");
    if (fields[0].empty()) throw line_error(lineno, "empty query id");
    queries.push_back({std::move(fields[0]), *category, std::move(fields[2])});
  }
  return queries;
}

std::vector<GroundTruthEntry> parse_ground_truth(std::istream& in) {
  std::vector<GroundTruthEntry> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skip_line(line)) continue;
    auto fields = split_tabs(line);
    if (fields.size() != 4) {
      throw line_error(lineno, "expected query_id<TAB>volume_id<TAB>page<TAB>relevance");
    }
    const std::string& page = fields[2];
    if (page.empty() || !std::all_of(page.begin(), page.end(), ::isdigit) ||
        page.size() > 9 || std::stoul(page) == 0) {
      throw line_error(lineno, "page number must be a positive integer");
    }
    if (fields[3] != "0" && fields[3] != "1") {
      throw line_error(lineno, "relevance must be 0 or 1");
    }
    if (fields[0].empty() || fields[1].empty()) {
      throw line_error(lineno, "empty query id or volume id");
    }
    entries.push_back({std::move(fields[0]),
                       {std::move(fields[1]), static_cast<std::uint32_t>(std::stoul(page))},
                       fields[3] == "1"});
  }
  return entries;
}

std::vector<BenchmarkQuery> load_benchmark(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return parse_benchmark(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::vector<GroundTruthEntry> load_ground_truth(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return parse_ground_truth(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void write_benchmark(std::ostream& out, std::span<const BenchmarkQuery> queries) {
  for (const auto& q : queries) {
    out << q.id << '\t' << to_string(q.category) << '\t' << q.text << '\n';
  }
}

void write_ground_truth(std::ostream& out, std::span<const GroundTruthEntry> entries) {
  for (const auto& e : entries) {
    out << e.query_id << '\t' << e.page.volume_id << '\t' << e.page.page_number
        << '\t' << (e.relevant ? 1 : 0) << '\n';
  }
}

GroundTruth::GroundTruth(std::vector<GroundTruthEntry> entries)
    : entries_(std::move(entries)) {
  for (const auto& e : entries_) {
    if (e.relevant) relevant_[e.query_id].insert(e.page);
  }
}

const std::set<PageRef>& GroundTruth::relevant(const std::string& query_id) const {
  static const std::set<PageRef> kNone;
  auto it = relevant_.find(query_id);
  return it == relevant_.end() ? kNone : it->second;
}

CategoryCounts standard_category_counts() {
  return {
      {Category::kVisual, 9},     {Category::kTextual, 14},
      {Category::kMultiModal, 10}, {Category::kTabular, 7},
      {Category::kNumerical, 8},  {Category::kMultiPage, 14},
      {Category::kConceptual, 13},
  };
}

std::string_view to_string(ValidationIssue::Kind kind) noexcept {
  using Kind = ValidationIssue::Kind;
  switch (kind) {
    case Kind::kUnanswerable: return "unanswerable";
    case Kind::kDangling: return "dangling";
    case Kind::kDuplicateId: return "duplicate_id";
    case Kind::kPrefixMismatch: return "prefix_mismatch";
    case Kind::kEmptyText: return "empty_text";
    case Kind::kDuplicateJudgment: return "duplicate_judgment";
    case Kind::kCountMismatch: return "count_mismatch";
  }
  return "unknown";
}

std::size_t ValidationReport::count(ValidationIssue::Kind kind) const noexcept {
  return static_cast<std::size_t>(std::count_if(
      issues.begin(), issues.end(), [&](const auto& i) { return i.kind == kind; }));
}

ValidationReport validate_benchmark(std::span<const BenchmarkQuery> queries,
                                    std::span<const GroundTruthEntry> ground_truth,
                                    const std::optional<CategoryCounts>& expected_counts) {
  using Kind = ValidationIssue::Kind;
  ValidationReport report;
  report.total_queries = queries.size();
  for (Category c : kAllCategories) report.counts[c] = 0;

  std::set<std::string> ids;
  for (const auto& q : queries) {
    ++report.counts[q.category];
    if (!ids.insert(q.id).second) {
      report.issues.push_back({Kind::kDuplicateId, q.id, "query id appears more than once"});
    }
    const std::string expected_prefix = std::string(id_prefix(q.category)) + "-";
    const std::string_view suffix = std::string_view(q.id).substr(
        std::min(q.id.size(), expected_prefix.size()));
    if (!q.id.starts_with(expected_prefix) || suffix.empty() ||
        !std::all_of(suffix.begin(), suffix.end(), ::isdigit)) {
      report.issues.push_back({Kind::kPrefixMismatch, q.id,
                               "id should look like " + expected_prefix + "<n> for " +
                                   std::string(to_string(q.category))});
    }
    if (std::all_of(q.text.begin(), q.text.end(),
                    [](unsigned char c) { return std::isspace(c); })) {
      report.issues.push_back({Kind::kEmptyText, q.id, "query text is blank"});
    }
  }

  std::set<std::string> answered;
  std::set<std::pair<std::string, PageRef>> judged;
  for (const auto& e : ground_truth) {
    if (!ids.contains(e.query_id)) {
      report.issues.push_back({Kind::kDangling, e.query_id,
                               "ground truth for unknown query (page " +
                                   to_string(e.page) + ")"});
    }
    if (!judged.emplace(e.query_id, e.page).second) {
      report.issues.push_back({Kind::kDuplicateJudgment, e.query_id,
                               "page " + to_string(e.page) + " judged twice"});
    }
    if (e.relevant) answered.insert(e.query_id);
  }
  for (const auto& q : queries) {
    if (!answered.contains(q.id)) {
      report.issues.push_back({Kind::kUnanswerable, q.id, "no relevant page in ground truth"});
    }
  }

  if (expected_counts) {
    std::size_t expected_total = 0;
    for (Category c : kAllCategories) {
      const auto it = expected_counts->find(c);
      const std::size_t want = it == expected_counts->end() ? 0 : it->second;
      expected_total += want;
      if (report.counts[c] != want) {
        report.issues.push_back({Kind::kCountMismatch, std::string(to_string(c)),
                                 "expected " + std::to_string(want) + " queries, found " +
                                     std::to_string(report.counts[c])});
      }
    }
    if (expected_total != queries.size()) {
      report.issues.push_back({Kind::kCountMismatch, "total",
                               "expected " + std::to_string(expected_total) +
                                   " queries, found " + std::to_string(queries.size())});
    }
  }
  return report;
}

}  // namespace folio::eval
