#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "folio/embedding.hpp"
#include "folio/late_interaction.hpp"
#include "folio/metric.hpp"

namespace folio {

struct SearchRequest {
  QueryEmbedding query;
  std::size_t k = 5;            // final results
  std::size_t candidates = 25;  // initial fetch before de-duplication
  bool explain = false;
};

struct ResultEntry {
  PageRef page;
  double score = 0.0;             // raw MaxSim
  double normalized_score = 0.0;  // score / query rows
  std::size_t rank = 0;           // 1-based
  std::optional<ScoreExplanation> explanation;
};

struct RankedResult {
  std::vector<ResultEntry> entries;

  std::vector<PageRef> pages() const;
};

// A named set of page embeddings scored under one fixed metric. Readers work
// on an immutable snapshot; upsert builds a new snapshot and swaps it in, so
// a search never observes a half-applied batch.
class Collection {
 public:
  struct Snapshot {
    std::vector<std::shared_ptr<const PageEmbedding>> pages;  // insertion order
    std::map<PageRef, std::size_t> index;
  };

  // Throws kValidation for an empty name or dims == 0.
  Collection(std::string name, Metric metric, std::size_t dims);

  Collection(const Collection&) = delete;
  Collection& operator=(const Collection&) = delete;

  const std::string& name() const noexcept { return name_; }
  Metric metric() const noexcept { return metric_; }
  std::size_t dims() const noexcept { return dims_; }
  std::size_t size() const;

  std::shared_ptr<const Snapshot> snapshot() const;

  // Inserts new pages and replaces existing ones (keeping their position).
  // Validates the whole batch before applying anything; throws
  // kDimensionMismatch naming the offending page. Returns entries.size().
  std::size_t upsert(std::vector<PageEmbedding> entries);

  // Exhaustive MaxSim over every page, top `candidates` by score (ties by
  // PageRef), duplicates removed, first k kept. Throws kEmptyCollection,
  // kDimensionMismatch, or kValidation when k is 0 or exceeds candidates.
  RankedResult search(const SearchRequest& request) const;

  // Full ranking of the collection under the same ordering rules.
  RankedResult search_all(const MultiVector& query, bool explain = false) const;

  // Worker threads used to score documents; 0 means hardware concurrency.
  void set_threads(std::size_t threads) noexcept { threads_ = threads; }

 private:
  std::vector<double> score_all(const Snapshot& snap,
                                const MultiVector& query) const;
  RankedResult assemble(const Snapshot& snap, const MultiVector& query,
                        const std::vector<double>& scores, std::size_t fetch,
                        std::size_t k, bool explain) const;

  std::string name_;
  Metric metric_;
  std::size_t dims_;
  std::size_t threads_ = 0;
  mutable std::mutex snapshot_mutex_;
  std::mutex writer_mutex_;
  std::shared_ptr<const Snapshot> snapshot_;
};

// Named collections, one metric each.
class CollectionRegistry {
 public:
  // Throws kConflict when the name is taken.
  std::shared_ptr<Collection> create(const std::string& name, Metric metric,
                                     std::size_t dims);
  // Registers an existing collection (e.g. one loaded from disk).
  void add(std::shared_ptr<Collection> collection);
  // Throws kNotFound.
  std::shared_ptr<Collection> get(const std::string& name) const;
  std::shared_ptr<Collection> find(const std::string& name) const;
  std::vector<std::shared_ptr<Collection>> list() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Collection>> collections_;
};

// Snapshot file: "MVC1" | version u32 | name (u16 len + bytes) |
// metric name (u16 len + bytes) | dims u32 | embedded MVE1 stream.
void save_collection(const Collection& collection,
                     const std::filesystem::path& path);
std::shared_ptr<Collection> load_collection(const std::filesystem::path& path);

}  // namespace folio
