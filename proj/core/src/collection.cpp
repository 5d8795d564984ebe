#include "folio/collection.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <thread>

#include "folio/error.hpp"

namespace folio {

std::vector<PageRef> RankedResult::pages() const {
  std::vector<PageRef> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.page);
  return out;
}

Collection::Collection(std::string name, Metric metric, std::size_t dims)
    : name_(std::move(name)),
      metric_(metric),
      dims_(dims),
      snapshot_(std::make_shared<const Snapshot>()) {
  if (name_.empty()) {
    throw Error(ErrorCode::kValidation, "collection name must not be empty");
  }
  if (dims_ == 0) {
    throw Error(ErrorCode::kValidation, "collection dims must be positive");
  }
}

std::size_t Collection::size() const { return snapshot()->pages.size(); }

std::shared_ptr<const Collection::Snapshot> Collection::snapshot() const {
  std::lock_guard lock(snapshot_mutex_);
  return snapshot_;
}

std::size_t Collection::upsert(std::vector<PageEmbedding> entries) {
  for (const auto& e : entries) {
    validate(e.page);
    if (e.embedding.dims() != dims_) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "page " + to_string(e.page) + " has dims " +
                      std::to_string(e.embedding.dims()) + ", collection '" +
                      name_ + "' expects " + std::to_string(dims_));
    }
  }
  const std::size_t count = entries.size();

  std::lock_guard writer(writer_mutex_);
  auto next = std::make_shared<Snapshot>(*snapshot());
  for (auto& e : entries) {
    auto page = std::make_shared<const PageEmbedding>(std::move(e));
    auto it = next->index.find(page->page);
    if (it != next->index.end()) {
      next->pages[it->second] = std::move(page);
    } else {
      next->index.emplace(page->page, next->pages.size());
      next->pages.push_back(std::move(page));
    }
  }
  std::shared_ptr<const Snapshot> frozen = std::move(next);
  std::lock_guard lock(snapshot_mutex_);
  snapshot_ = std::move(frozen);
  return count;
}

std::vector<double> Collection::score_all(const Snapshot& snap,
                                          const MultiVector& query) const {
  if (snap.pages.empty()) {
    throw Error(ErrorCode::kEmptyCollection,
                "collection '" + name_ + "' has no pages");
  }
  if (query.dims() != dims_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "query dims " + std::to_string(query.dims()) +
                    " != collection '" + name_ + "' dims " +
                    std::to_string(dims_));
  }
  const std::size_t n = snap.pages.size();
  std::vector<double> scores(n);
  std::size_t workers = threads_ != 0 ? threads_ : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, n);

  // Each document is scored independently, so the result does not depend on
  // how pages are split across threads.
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      scores[i] = maxsim_score(query, snap.pages[i]->embedding, metric_);
    }
  };
  if (workers == 1) {
    work(0, n);
    return scores;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back(work, begin, end);
  }
  pool.clear();
  return scores;
}

RankedResult Collection::assemble(const Snapshot& snap, const MultiVector& query,
                                  const std::vector<double>& scores,
                                  std::size_t fetch, std::size_t k,
                                  bool explain) const {
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto better = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return snap.pages[a]->page < snap.pages[b]->page;
  };
  fetch = std::min(fetch, n);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(fetch),
                    order.end(), better);
  order.resize(fetch);

  RankedResult result;
  std::set<PageRef> seen;
  for (std::size_t idx : order) {
    if (result.entries.size() == k) break;
    const PageEmbedding& page = *snap.pages[idx];
    if (!seen.insert(page.page).second) continue;
    ResultEntry entry;
    entry.page = page.page;
    entry.score = scores[idx];
    entry.normalized_score = normalized_score(scores[idx], query.rows());
    entry.rank = result.entries.size() + 1;
    if (explain) entry.explanation = maxsim_explain(query, page.embedding, metric_);
    result.entries.push_back(std::move(entry));
  }
  return result;
}

RankedResult Collection::search(const SearchRequest& request) const {
  if (request.k == 0) {
    throw Error(ErrorCode::kValidation, "k must be at least 1");
  }
  if (request.k > request.candidates) {
    throw Error(ErrorCode::kValidation, "k exceeds candidates");
  }
  const auto snap = snapshot();
  const MultiVector& query = request.query.embedding;
  const auto scores = score_all(*snap, query);
  return assemble(*snap, query, scores, request.candidates, request.k,
                  request.explain);
}

RankedResult Collection::search_all(const MultiVector& query, bool explain) const {
  const auto snap = snapshot();
  const auto scores = score_all(*snap, query);
  return assemble(*snap, query, scores, scores.size(), scores.size(), explain);
}

std::shared_ptr<Collection> CollectionRegistry::create(const std::string& name,
                                                       Metric metric,
                                                       std::size_t dims) {
  auto collection = std::make_shared<Collection>(name, metric, dims);
  add(collection);
  return collection;
}

void CollectionRegistry::add(std::shared_ptr<Collection> collection) {
  std::lock_guard lock(mutex_);
  const std::string& name = collection->name();
  if (collections_.contains(name)) {
    throw Error(ErrorCode::kConflict, "collection '" + name + "' already exists");
  }
  collections_.emplace(name, std::move(collection));
}

std::shared_ptr<Collection> CollectionRegistry::get(const std::string& name) const {
  if (auto c = find(name)) return c;
  throw Error(ErrorCode::kNotFound, "collection '" + name + "' not found");
}

std::shared_ptr<Collection> CollectionRegistry::find(const std::string& name) const {
  std::lock_guard lock(mutex_);
  auto it = collections_.find(name);
  return it == collections_.end() ? nullptr : it->second;
}

std::vector<std::shared_ptr<Collection>> CollectionRegistry::list() const {
  std::lock_guard lock(mutex_);
  std::vector<std::shared_ptr<Collection>> out;
  out.reserve(collections_.size());
  for (const auto& [_, c] : collections_) out.push_back(c);
  return out;
}

}  // namespace folio
