#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "folio/embedding.hpp"
#include "folio/eval/benchmark.hpp"
#include "folio/mock_embedder.hpp"

namespace folio {

struct SyntheticCorpusOptions {
  std::size_t pages = 500;
  std::size_t page_rows = 64;
  std::size_t dims = 32;
  std::uint64_t seed = 7;
  std::size_t volumes = 5;
  eval::CategoryCounts counts = eval::standard_category_counts();
  // Adds one unlabeled page whose content duplicates a relevant page.
  bool plant_near_duplicate = true;
};

// A mock-embedded corpus with a benchmark whose answers are known. Every
// query has one answer page built from the query's own text, so the mock
// query embedding equals that page's leading rows. Multi-page queries also
// label the following page of the same volume as relevant.
struct SyntheticCorpus {
  std::vector<PageEmbedding> pages;
  std::vector<eval::BenchmarkQuery> queries;
  std::vector<eval::GroundTruthEntry> ground_truth;
  std::vector<PageRef> answer_pages;  // parallel to queries
  std::vector<PageRef> planted;       // unlabeled near-duplicates
  std::string planted_for;            // query id the duplicate copies
  MockEmbedderConfig embedder;        // embeds the benchmark queries
};

// Throws kValidation when `pages` is too small to hold every answer page.
SyntheticCorpus make_synthetic_corpus(const SyntheticCorpusOptions& options = {});

}  // namespace folio
