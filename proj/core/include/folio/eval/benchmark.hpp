#pragma once

// Benchmark and ground-truth files, one record per line, tab separated:
//
//   benchmark:     id <TAB> category <TAB> query text
//   ground truth:  query_id <TAB> volume_id <TAB> page_number <TAB> 0|1
//
// Blank lines and lines starting with '#' are ignored.

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "folio/embedding.hpp"

namespace folio::eval {

enum class Category {
  kVisual,
  kTextual,
  kMultiModal,
  kTabular,
  kNumerical,
  kMultiPage,
  kConceptual,
};

inline constexpr std::array<Category, 7> kAllCategories = {
    Category::kVisual,    Category::kTextual,   Category::kMultiModal,
    Category::kTabular,   Category::kNumerical, Category::kMultiPage,
    Category::kConceptual};

// File spelling: "Visual", "MultiModal", "MultiPage", ...
std::string_view to_string(Category category) noexcept;
// Table spelling: "Multi-Modal", "Multi-Page", ...
std::string_view display_name(Category category) noexcept;
// Query id prefix: VI, TX, MM, TB, NU, MP, CP.
std::string_view id_prefix(Category category) noexcept;
// Case-insensitive; ignores '-', '_' and spaces, so "multi-page" parses.
std::optional<Category> try_parse_category(std::string_view name) noexcept;

struct BenchmarkQuery {
  std::string id;
  Category category = Category::kTextual;
  std::string text;

  friend bool operator==(const BenchmarkQuery&, const BenchmarkQuery&) = default;
};

struct GroundTruthEntry {
  std::string query_id;
  PageRef page;
  bool relevant = true;

  friend bool operator==(const GroundTruthEntry&, const GroundTruthEntry&) = default;
};

// Throw Error(kFormat) naming the line for malformed records.
std::vector<BenchmarkQuery> parse_benchmark(std::istream& in);
std::vector<GroundTruthEntry> parse_ground_truth(std::istream& in);
std::vector<BenchmarkQuery> load_benchmark(const std::filesystem::path& path);
std::vector<GroundTruthEntry> load_ground_truth(const std::filesystem::path& path);

void write_benchmark(std::ostream& out, std::span<const BenchmarkQuery> queries);
void write_ground_truth(std::ostream& out, std::span<const GroundTruthEntry> entries);

// Relevant pages per query (judgments of 1 only).
class GroundTruth {
 public:
  GroundTruth() = default;
  explicit GroundTruth(std::vector<GroundTruthEntry> entries);

  const std::set<PageRef>& relevant(const std::string& query_id) const;
  std::span<const GroundTruthEntry> entries() const noexcept { return entries_; }

 private:
  std::vector<GroundTruthEntry> entries_;
  std::map<std::string, std::set<PageRef>> relevant_;
};

using CategoryCounts = std::map<Category, std::size_t>;

// Visual 9, Textual 14, Multi-Modal 10, Tabular 7, Numerical 8,
// Multi-Page 14, Conceptual 13 (75 queries).
CategoryCounts standard_category_counts();

struct ValidationIssue {
  enum class Kind {
    kUnanswerable,       // no relevant ground-truth page
    kDangling,           // ground truth for an unknown query id
    kDuplicateId,        // query id used twice
    kPrefixMismatch,     // id prefix disagrees with category
    kEmptyText,          // blank query text
    kDuplicateJudgment,  // same (query, page) judged twice
    kCountMismatch,      // category count differs from the expectation
  };
  Kind kind;
  std::string subject;  // query id or category name
  std::string message;
};

std::string_view to_string(ValidationIssue::Kind kind) noexcept;

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  CategoryCounts counts;
  std::size_t total_queries = 0;

  bool ok() const noexcept { return issues.empty(); }
  std::size_t count(ValidationIssue::Kind kind) const noexcept;
};

// Report-only; never throws on content problems.
ValidationReport validate_benchmark(
    std::span<const BenchmarkQuery> queries,
    std::span<const GroundTruthEntry> ground_truth,
    const std::optional<CategoryCounts>& expected_counts = std::nullopt);

}  // namespace folio::eval
