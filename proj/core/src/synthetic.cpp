#include "folio/synthetic.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "folio/error.hpp"

namespace folio {

namespace {

constexpr const char* kTopics[] = {
    "scheduling", "deadlock",  "paging",     "consensus",  "replication",
    "routing",    "caching",   "recursion",  "closures",   "sorting",
    "hashing",    "search",    "planning",   "congestion", "semaphores",
    "transactions", "indexing", "heuristics", "compilers", "interrupts",
    "filesystems", "latency",  "graphs",     "automata",
};

std::string volume_name(std::size_t v) {
  std::string digits = std::to_string(v + 1);
  if (digits.size() < 2) digits.insert(0, "0");
  return "vol" + digits;
}

std::string lowercase(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '-') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace

SyntheticCorpus make_synthetic_corpus(const SyntheticCorpusOptions& options) {
  using eval::Category;
  if (options.volumes == 0) {
    throw Error(ErrorCode::kValidation, "synthetic corpus needs at least one volume");
  }
  std::mt19937_64 gen(options.seed);

  SyntheticCorpus corpus;
  corpus.embedder = {options.page_rows, options.dims, options.seed, 0};
  const MockEmbedder embedder(corpus.embedder);

  // Queries, in category order.
  for (Category c : eval::kAllCategories) {
    const auto it = options.counts.find(c);
    const std::size_t n = it == options.counts.end() ? 0 : it->second;
    for (std::size_t i = 1; i <= n; ++i) {
      const char* a = kTopics[gen() % std::size(kTopics)];
      const char* b = kTopics[gen() % std::size(kTopics)];
      eval::BenchmarkQuery q;
      q.id = std::string(eval::id_prefix(c)) + "-" + std::to_string(i);
      q.category = c;
      q.text = lowercase(eval::display_name(c)) + " question " + std::to_string(i) +
               " on " + a + " and " + b;
      corpus.queries.push_back(std::move(q));
    }
  }

  const std::size_t planted = options.plant_near_duplicate && !corpus.queries.empty() ? 1 : 0;
  std::size_t needed = planted;
  for (const auto& q : corpus.queries) needed += q.category == Category::kMultiPage ? 2 : 1;
  if (options.pages < needed) {
    throw Error(ErrorCode::kValidation,
                "synthetic corpus needs at least " + std::to_string(needed) + " pages");
  }

  // Page slots laid out volume by volume.
  const std::size_t body_pages = options.pages - planted;
  const std::size_t per_volume = (body_pages + options.volumes - 1) / options.volumes;
  std::vector<PageRef> slots;
  for (std::size_t i = 0; i < body_pages; ++i) {
    slots.push_back({volume_name(i / per_volume),
                     static_cast<std::uint32_t>(i % per_volume + 1)});
  }
  const std::set<PageRef> slot_set(slots.begin(), slots.end());

  // Fisher-Yates with the raw generator keeps the layout identical across
  // standard library implementations.
  std::vector<PageRef> order = slots;
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[gen() % i]);
  }

  std::map<PageRef, std::string> content;
  std::size_t cursor = 0;
  for (const auto& q : corpus.queries) {
    const bool multi = q.category == Category::kMultiPage;
    while (true) {
      if (cursor >= order.size()) {
        throw Error(ErrorCode::kValidation, "not enough free pages for multi-page answers");
      }
      const PageRef candidate = order[cursor++];
      if (content.contains(candidate)) continue;
      const PageRef next{candidate.volume_id, candidate.page_number + 1};
      if (multi && (!slot_set.contains(next) || content.contains(next))) continue;
      content[candidate] = q.text;
      corpus.answer_pages.push_back(candidate);
      corpus.ground_truth.push_back({q.id, candidate, true});
      if (multi) {
        content[next] = "continued from " + q.text;
        corpus.ground_truth.push_back({q.id, next, true});
      }
      break;
    }
  }
  // A non-relevant judgment every third query, on some filler page.
  for (std::size_t i = 0; i < corpus.queries.size(); i += 3) {
    for (std::size_t tries = 0; tries < slots.size(); ++tries) {
      const PageRef& p = slots[gen() % slots.size()];
      if (!content.contains(p)) {
        corpus.ground_truth.push_back({corpus.queries[i].id, p, false});
        break;
      }
    }
  }

  corpus.pages.reserve(options.pages);
  for (const auto& slot : slots) {
    auto it = content.find(slot);
    const std::string input =
        it != content.end() ? it->second : "filler page " + to_string(slot);
    corpus.pages.push_back({slot, embedder.embed_page_input(input)});
  }

  if (planted) {
    auto target = std::find_if(corpus.queries.begin(), corpus.queries.end(),
                               [](const auto& q) { return q.category == Category::kConceptual; });
    if (target == corpus.queries.end()) target = corpus.queries.begin();
    const PageRef dup{"appendix", 1};
    corpus.pages.push_back({dup, embedder.embed_page_input(target->text)});
    corpus.planted.push_back(dup);
    corpus.planted_for = target->id;
  }
  return corpus;
}

}  // namespace folio
