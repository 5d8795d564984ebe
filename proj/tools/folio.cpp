// folio: command-line front end for ingestion, indexing, search and
// benchmark evaluation.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "folio/collection.hpp"
#include "folio/embedding_file.hpp"
#include "folio/embedding_service.hpp"
#include "folio/error.hpp"
#include "folio/eval/benchmark.hpp"
#include "folio/eval/report.hpp"
#include "folio/eval/runner.hpp"
#include "folio/mock_embedder.hpp"
#include "folio/page_image.hpp"
#include "folio/rasterize.hpp"
#include "folio/service.hpp"
#include "folio/synthetic.hpp"

namespace fs = std::filesystem;
using namespace folio;

namespace {

struct EmbedderOptions {
  std::string endpoint;
  std::string model_id;
  bool mock = false;
  std::size_t rows = 32;
  std::size_t dims = 16;
  std::uint64_t seed = 7;
  std::size_t max_in_flight = 4;

  void add_to(CLI::App* app) {
    app->add_option("--endpoint", endpoint, "Embedding service base URL");
    app->add_option("--model-id", model_id, "Expected model id at the endpoint");
    app->add_flag("--mock", mock, "Use the deterministic mock embedder");
    app->add_option("--rows", rows, "Mock rows per page image");
    app->add_option("--dims", dims, "Mock embedding dimension");
    app->add_option("--seed", seed, "Mock seed");
    app->add_option("--max-in-flight", max_in_flight, "Concurrent embedding requests");
  }

  std::shared_ptr<const Embedder> make() const {
    if (mock) return std::make_shared<MockEmbedder>(MockEmbedderConfig{rows, dims, seed, 0});
    if (endpoint.empty()) throw Error(ErrorCode::kValidation, "either --endpoint or --mock is required");
    return std::make_shared<HttpEmbedder>(EmbedderConfig{
        .endpoint = endpoint, .model_id = model_id, .max_in_flight = max_in_flight});
  }
};

std::optional<eval::Category> parse_subset(const std::string& subset) {
  if (subset.empty() || subset == "all") return std::nullopt;
  auto c = eval::try_parse_category(subset);
  if (!c) throw Error(ErrorCode::kValidation, "unknown category '" + subset + "'");
  return c;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
}

std::string utc_now() {
  const auto t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

void wait_for_signal() {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  int sig = 0;
  sigwait(&set, &sig);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-vector page retrieval and benchmark evaluation"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Rasterize PDFs into page images");
  fs::path pdf_dir, images_out;
  std::uint32_t dpi = 300;
  std::vector<std::string> renderer{"pdftoppm"};
  ingest->add_option("--pdf-dir", pdf_dir, "Directory of PDF volumes")->required();
  ingest->add_option("--out", images_out, "Output image directory")->required();
  ingest->add_option("--dpi", dpi, "Rasterization resolution");
  ingest->add_option("--renderer", renderer, "Renderer command (pdftoppm-compatible)")
      ->expected(1, -1);

  // embed
  auto* embed = app.add_subcommand("embed", "Embed page images into an MVE1 file");
  fs::path embed_images, embed_out;
  EmbedderOptions embed_opts;
  embed->add_option("--images", embed_images, "Page image directory")->required();
  embed->add_option("--out", embed_out, "Output embedding file")->required();
  embed->add_option("--dpi", dpi, "Resolution recorded in the manifest");
  embed_opts.add_to(embed);

  // index
  auto* index = app.add_subcommand("index", "Build a collection snapshot from embedding files");
  std::vector<fs::path> index_inputs;
  fs::path index_out;
  std::string index_name, index_metric = "cosine";
  index->add_option("--embeddings", index_inputs, "MVE1 embedding files")->required();
  index->add_option("--name", index_name, "Collection name")->required();
  index->add_option("--metric", index_metric, "cosine, dot, euclidean or manhattan");
  index->add_option("--out", index_out, "Output collection file")->required();

  // search
  auto* search = app.add_subcommand("search", "Search a collection with a text query");
  fs::path search_collection;
  std::string search_query;
  std::size_t k = 5, candidates = 25;
  bool explain = false, as_json = false;
  EmbedderOptions search_opts;
  search->add_option("--collection", search_collection, "Collection file")->required();
  search->add_option("--query", search_query, "Query text")->required();
  search->add_option("-k", k, "Results to return");
  search->add_option("--candidates", candidates, "Candidates fetched before de-duplication");
  search->add_flag("--explain", explain, "Show per-token matches");
  search->add_flag("--json", as_json, "Print JSON");
  search_opts.add_to(search);

  // validate
  auto* validate = app.add_subcommand("validate", "Check benchmark and ground-truth files");
  fs::path benchmark_file, ground_truth_file;
  bool standard_counts = true;
  validate->add_option("--benchmark", benchmark_file, "Benchmark TSV")->required();
  validate->add_option("--ground-truth", ground_truth_file, "Ground-truth TSV")->required();
  validate->add_flag("!--no-standard-counts", standard_counts, "Skip the per-category count check");

  // bench
  auto* bench = app.add_subcommand("bench", "Run the benchmark over one or more collections");
  std::vector<fs::path> bench_collections;
  fs::path bench_out;
  std::string subset;
  EmbedderOptions bench_opts;
  bench->add_option("--collections", bench_collections, "Collection files")->required();
  bench->add_option("--benchmark", benchmark_file, "Benchmark TSV")->required();
  bench->add_option("--ground-truth", ground_truth_file, "Ground-truth TSV")->required();
  bench->add_option("--out", bench_out, "Report directory")->required();
  bench->add_option("--subset", subset, "Category to run (default all)");
  bench->add_option("-k", k, "Cutoff");
  bench->add_option("--candidates", candidates, "Candidates fetched before de-duplication");
  bench_opts.add_to(bench);

  // tail
  auto* tail = app.add_subcommand("tail", "Flag unlabeled high-scoring pages");
  fs::path tail_collection, tail_out;
  double threshold = 0.85;
  EmbedderOptions tail_opts;
  tail->add_option("--collection", tail_collection, "Collection file")->required();
  tail->add_option("--benchmark", benchmark_file, "Benchmark TSV")->required();
  tail->add_option("--ground-truth", ground_truth_file, "Ground-truth TSV")->required();
  tail->add_option("--threshold", threshold, "Normalized score threshold in (0, 1]");
  tail->add_option("--out", tail_out, "Report directory")->required();
  tail->add_option("--candidates", candidates, "Ranks inspected per query");
  tail_opts.add_to(tail);

  // synth
  auto* synth = app.add_subcommand("synth", "Write a synthetic corpus and benchmark");
  fs::path synth_out;
  SyntheticCorpusOptions synth_opts;
  bool no_plant = false;
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--pages", synth_opts.pages, "Page count");
  synth->add_option("--rows", synth_opts.page_rows, "Rows per page");
  synth->add_option("--dims", synth_opts.dims, "Embedding dimension");
  synth->add_option("--seed", synth_opts.seed, "Seed");
  synth->add_option("--volumes", synth_opts.volumes, "Volume count");
  synth->add_flag("--no-plant", no_plant, "Do not plant an unlabeled duplicate page");

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP search service");
  std::string host = "127.0.0.1";
  int port = 8080;
  std::vector<fs::path> serve_collections;
  fs::path serve_images;
  EmbedderOptions serve_opts;
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port");
  serve->add_option("--collections", serve_collections, "Collection files to preload");
  serve->add_option("--images", serve_images, "Page image directory");
  serve->add_option("--benchmark", benchmark_file, "Benchmark TSV for runs");
  serve->add_option("--ground-truth", ground_truth_file, "Ground-truth TSV for runs");
  serve_opts.add_to(serve);

  // mock-model-server
  auto* mock_server = app.add_subcommand("mock-model-server", "Serve the mock embedder over HTTP");
  MockEmbedderConfig mock_cfg;
  mock_server->add_option("--host", host, "Bind address");
  mock_server->add_option("--port", port, "Port");
  mock_server->add_option("--rows", mock_cfg.page_rows, "Rows per page image");
  mock_server->add_option("--dims", mock_cfg.dims, "Embedding dimension");
  mock_server->add_option("--seed", mock_cfg.seed, "Seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      std::vector<fs::path> pdfs;
      for (const auto& e : fs::directory_iterator(pdf_dir)) {
        if (e.path().extension() == ".pdf") pdfs.push_back(e.path());
      }
      std::sort(pdfs.begin(), pdfs.end());
      if (pdfs.empty()) throw Error(ErrorCode::kIngestion, "no PDFs in " + pdf_dir.string());
      for (const auto& pdf : pdfs) {
        const auto images = rasterize_volume(pdf, dpi, {renderer});
        write_page_images(images_out, images);
        std::cout << pdf.stem().string() << ": " << images.size() << " pages\n";
      }
    } else if (*embed) {
      const auto embedder = embed_opts.make();
      const auto images = read_page_images(embed_images, dpi);
      const auto pages = embed_pages(images, *embedder, embed_opts.max_in_flight);
      Manifest manifest;
      manifest.source_file = embed_images.string();
      manifest.dpi = dpi;
      manifest.model_id = embedder->model_id();
      write_embedding_file(embed_out, pages, manifest);
      std::cout << "embedded " << pages.size() << " pages into " << embed_out.string() << "\n";
    } else if (*index) {
      std::vector<PageEmbedding> all;
      for (const auto& f : index_inputs) {
        auto pages = read_embedding_file(f);
        std::move(pages.begin(), pages.end(), std::back_inserter(all));
      }
      if (all.empty()) throw Error(ErrorCode::kEmptyCollection, "no pages in the inputs");
      Collection c(index_name, parse_metric(index_metric), all.front().embedding.dims());
      c.upsert(std::move(all));
      save_collection(c, index_out);
      std::cout << index_name << ": " << c.size() << " pages, " << to_string(c.metric()) << "\n";
    } else if (*search) {
      const auto collection = load_collection(search_collection);
      const auto embedder = search_opts.make();
      const auto query = embed_query(search_query, *embedder, "cli");
      const auto result = collection->search({query, k, candidates, explain});
      if (as_json) {
        std::cout << "[";
        for (std::size_t i = 0; i < result.entries.size(); ++i) {
          const auto& e = result.entries[i];
          std::cout << (i ? "," : "") << "{\"volume_id\":\"" << e.page.volume_id
                    << "\",\"page_number\":" << e.page.page_number << ",\"rank\":" << e.rank
                    << ",\"score\":" << std::setprecision(17) << e.score
                    << ",\"normalized_score\":" << e.normalized_score << "}";
        }
        std::cout << "]\n";
      } else {
        for (const auto& e : result.entries) {
          std::cout << e.rank << "\t" << to_string(e.page) << "\t" << std::fixed
                    << std::setprecision(4) << e.score << "\t" << e.normalized_score << "\n";
          if (e.explanation) {
            for (const auto& m : e.explanation->per_token) {
              std::cout << "\t\ttoken " << m.token << " -> patch " << m.patch << " ("
                        << m.similarity << ")\n";
            }
          }
        }
      }
    } else if (*validate) {
      const auto queries = eval::load_benchmark(benchmark_file);
      const auto gt = eval::load_ground_truth(ground_truth_file);
      const auto report = standard_counts
                              ? eval::validate_benchmark(queries, gt, eval::standard_category_counts())
                              : eval::validate_benchmark(queries, gt);
      for (const auto& [category, n] : report.counts) {
        std::cout << eval::display_name(category) << "\t" << n << "\n";
      }
      std::cout << "total\t" << report.total_queries << "\n";
      for (const auto& issue : report.issues) {
        std::cout << to_string(issue.kind) << "\t" << issue.subject << "\t" << issue.message << "\n";
      }
      std::cout << (report.ok() ? "ok" : "invalid") << "\n";
      return report.ok() ? 0 : 1;
    } else if (*bench) {
      const auto embedder = bench_opts.make();
      const auto queries = eval::load_benchmark(benchmark_file);
      const eval::GroundTruth gt(eval::load_ground_truth(ground_truth_file));
      const auto category = parse_subset(subset);
      const std::string stamp = utc_now();
      std::vector<eval::MetricsReport> reports;
      for (const auto& file : bench_collections) {
        const auto collection = load_collection(file);
        reports.push_back(eval::run_benchmark(
            *collection, queries, gt, *embedder,
            {.k = k, .candidates = candidates, .subset = category, .timestamp = stamp}));
        const auto& r = reports.back();
        std::ostringstream text;
        eval::write_report_text(text, r);
        write_text(bench_out / (r.collection + ".txt"), text.str());
        write_text(bench_out / (r.collection + ".json"), eval::report_json(r));
        std::cout << r.collection << ": MRR " << std::fixed << std::setprecision(3)
                  << r.overall.mrr << ", " << r.failures.size() << " failures\n";
      }
      std::ostringstream tables;
      eval::write_comparison_table(tables, reports, "Overall");
      for (auto c : eval::kAllCategories) {
        tables << "\n";
        eval::write_comparison_table(tables, reports, eval::display_name(c), c);
      }
      write_text(bench_out / "comparison.md", tables.str());
    } else if (*tail) {
      const auto embedder = tail_opts.make();
      const auto collection = load_collection(tail_collection);
      const auto queries = eval::load_benchmark(benchmark_file);
      const eval::GroundTruth gt(eval::load_ground_truth(ground_truth_file));
      const auto report = eval::unbounded_analysis(*collection, queries, gt, *embedder, threshold,
                                                   {.candidates = candidates, .timestamp = utc_now()});
      eval::write_tail_report(tail_out, report);
      write_text(tail_out / "tail.json", eval::tail_report_json(report));
      std::cout << report.candidates.size() << " candidates across " << report.affected_queries
                << " of " << report.total_queries << " queries\n";
    } else if (*synth) {
      synth_opts.plant_near_duplicate = !no_plant;
      const auto corpus = make_synthetic_corpus(synth_opts);
      fs::create_directories(synth_out);
      Manifest manifest;
      manifest.model_id = "mock";
      manifest.extra["seed"] = std::to_string(synth_opts.seed);
      write_embedding_file(synth_out / "pages.mve", corpus.pages, manifest);
      std::ostringstream b, g;
      eval::write_benchmark(b, corpus.queries);
      eval::write_ground_truth(g, corpus.ground_truth);
      write_text(synth_out / "benchmark.tsv", b.str());
      write_text(synth_out / "ground_truth.tsv", g.str());
      std::cout << corpus.pages.size() << " pages, " << corpus.queries.size()
                << " queries; embed queries with --mock --dims " << corpus.embedder.dims
                << " --seed " << corpus.embedder.seed << "\n";
    } else if (*serve) {
      ServiceConfig config;
      if (serve_opts.mock || !serve_opts.endpoint.empty()) config.embedder = serve_opts.make();
      config.images_dir = serve_images;
      config.benchmark_file = benchmark_file;
      config.ground_truth_file = ground_truth_file;
      Service service(config);
      for (const auto& f : serve_collections) service.collections().add(load_collection(f));
      const int bound = service.start(host, port);
      std::cout << "listening on " << host << ":" << bound << std::endl;
      wait_for_signal();
      service.stop();
    } else if (*mock_server) {
      EmbeddingServiceServer server(std::make_shared<MockEmbedder>(mock_cfg));
      const int bound = server.start(host, port);
      std::cout << "mock model listening on " << host << ":" << bound << std::endl;
      wait_for_signal();
      server.stop();
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
