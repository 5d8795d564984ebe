#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "folio/eval/runner.hpp"

namespace folio::eval {

// Human-readable report: metadata block, per-query table, per-category
// table, overall table, then failures and warnings.
void write_report_text(std::ostream& out, const MetricsReport& report);
// Machine-readable variant with the same content.
std::string report_json(const MetricsReport& report);

// One row per measure (Prec@k, Recall@k, F1@k, AP, MRR), one column per
// report (usually one per metric), values to three decimals. With a
// category, the per-category aggregates are used; a report lacking that
// category prints "-".
void write_comparison_table(std::ostream& out,
                            std::span<const MetricsReport> reports,
                            std::string_view title,
                            std::optional<Category> category = std::nullopt);

// <dir>/curves/<query_id>.tsv   rank<TAB>normalized_score
// <dir>/candidates.tsv          query_id, volume_id, page, rank, score, normalized
// <dir>/summary.txt
void write_tail_report(const std::filesystem::path& dir, const TailReport& report);
std::string tail_report_json(const TailReport& report);

}  // namespace folio::eval
