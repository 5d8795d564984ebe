#include "folio/service.hpp"

#include <httplib.h>

#include <chrono>
#include <condition_variable>
#include <deque>
#include <fstream>
#include <sstream>
#include <thread>

#include "eval/json_codec.hpp"
#include "folio/embedding_file.hpp"
#include "folio/error.hpp"
#include "folio/eval/benchmark.hpp"
#include "folio/eval/runner.hpp"
#include "folio/page_image.hpp"

namespace folio {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Error codes exposed by the API.
struct ApiError {
  int status;
  std::string code;
  std::string message;
  json detail = nullptr;
};

ApiError from_library_error(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kDimensionMismatch:
      return {400, "dims_mismatch", e.what()};
    case ErrorCode::kConflict:
      return {409, "collection_exists", e.what()};
    case ErrorCode::kNotFound:
      return {404, "collection_not_found", e.what()};
    case ErrorCode::kEmptyCollection:
      return {409, "empty_collection", e.what()};
    case ErrorCode::kEmbedderUnavailable:
    case ErrorCode::kMalformedResponse:
      return {503, "embedder_unavailable", e.what()};
    case ErrorCode::kFormat:
    case ErrorCode::kTruncation:
      return {400, "format_error", e.what()};
    case ErrorCode::kValidation:
    case ErrorCode::kUndefinedRecall:
      return {400, "invalid_request", e.what()};
    default:
      return {500, "internal", e.what()};
  }
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const ApiError& error) {
  send_json(res, error.status,
            {{"error",
              {{"code", error.code}, {"message", error.message}, {"detail", error.detail}}}});
}

// Runs a handler, turning thrown errors into ApiError bodies.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const ApiError& e) {
    send_error(res, e);
  } catch (const Error& e) {
    send_error(res, from_library_error(e));
  } catch (const json::exception& e) {
    send_error(res, {400, "invalid_request", e.what()});
  } catch (const std::exception& e) {
    send_error(res, {500, "internal", e.what()});
  }
}

json parse_body(const httplib::Request& req) {
  auto body = json::parse(req.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) {
    throw ApiError{400, "invalid_request", "request body must be a JSON object"};
  }
  return body;
}

std::size_t positive_int(const json& body, const char* key, std::size_t fallback) {
  if (!body.contains(key) || body[key].is_null()) return fallback;
  if (!body[key].is_number_integer() || body[key].get<long long>() < 1) {
    throw ApiError{400, "invalid_request", std::string(key) + " must be a positive integer"};
  }
  return body[key].get<std::size_t>();
}

json collection_json(const Collection& c) {
  return {{"name", c.name()},
          {"metric", to_string(c.metric())},
          {"dims", c.dims()},
          {"size", c.size()}};
}

std::string utc_now() {
  const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Run {
  std::string id;
  std::string analysis;  // "benchmark" | "unbounded"
  std::string status = "queued";
  std::vector<std::shared_ptr<Collection>> collections;
  std::vector<eval::BenchmarkQuery> queries;
  eval::GroundTruth ground_truth;
  eval::RunOptions options;
  double threshold = 0.85;
  std::size_t completed = 0;
  std::size_t total = 0;
  json reports = json::array();
  std::string error;
};

}  // namespace

struct Service::Impl {
  ServiceConfig config;
  CollectionRegistry registry;
  httplib::Server server;
  std::thread server_thread;

  std::vector<eval::BenchmarkQuery> benchmark;
  std::vector<eval::GroundTruthEntry> ground_truth;
  bool benchmark_loaded = false;

  std::mutex runs_mutex;
  std::condition_variable runs_cv;
  std::map<std::string, std::shared_ptr<Run>> runs;
  std::deque<std::shared_ptr<Run>> queue;
  std::size_t next_run = 1;
  bool shutting_down = false;
  std::thread runner;

  explicit Impl(ServiceConfig c) : config(std::move(c)) {
    if (!config.benchmark_file.empty() && !config.ground_truth_file.empty()) {
      benchmark = eval::load_benchmark(config.benchmark_file);
      ground_truth = eval::load_ground_truth(config.ground_truth_file);
      benchmark_loaded = true;
    }
    install_routes();
    runner = std::thread([this] { run_loop(); });
  }

  ~Impl() {
    server.stop();
    if (server_thread.joinable()) server_thread.join();
    {
      std::lock_guard lock(runs_mutex);
      shutting_down = true;
    }
    runs_cv.notify_all();
    if (runner.joinable()) runner.join();
  }

  const Embedder& require_embedder() const {
    if (!config.embedder) {
      throw ApiError{503, "embedder_unavailable", "no embedder configured on this server"};
    }
    return *config.embedder;
  }

  // Runs execute one at a time, each against the collection snapshots current
  // when it starts; searches are never blocked by them.
  void run_loop() {
    while (true) {
      std::shared_ptr<Run> run;
      {
        std::unique_lock lock(runs_mutex);
        runs_cv.wait(lock, [&] { return shutting_down || !queue.empty(); });
        if (shutting_down) return;
        run = queue.front();
        queue.pop_front();
        run->status = "running";
      }
      try {
        const eval::GroundTruth& gt = run->ground_truth;
        const std::size_t per_collection = run->total / std::max<std::size_t>(1, run->collections.size());
        for (std::size_t i = 0; i < run->collections.size(); ++i) {
          eval::RunOptions options = run->options;
          options.progress = [&, i](std::size_t done, std::size_t) {
            std::lock_guard lock(runs_mutex);
            run->completed = i * per_collection + done;
          };
          json report;
          if (run->analysis == "unbounded") {
            report = eval::to_json(eval::unbounded_analysis(*run->collections[i], run->queries,
                                                            gt, require_embedder(),
                                                            run->threshold, options));
          } else {
            report = eval::to_json(eval::run_benchmark(*run->collections[i], run->queries, gt,
                                                       require_embedder(), options));
          }
          std::lock_guard lock(runs_mutex);
          run->reports.push_back(std::move(report));
        }
        std::lock_guard lock(runs_mutex);
        run->completed = run->total;
        run->status = "done";
      } catch (const std::exception& e) {
        std::lock_guard lock(runs_mutex);
        run->status = "failed";
        run->error = e.what();
      } catch (const ApiError& e) {
        std::lock_guard lock(runs_mutex);
        run->status = "failed";
        run->error = e.message;
      }
    }
  }

  void install_routes() {
    server.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] {
        json model = nullptr;
        if (config.embedder) {
          try {
            model = config.embedder->model_id();
          } catch (const std::exception&) {
            model = nullptr;
          }
        }
        send_json(res, 200,
                  {{"status", "ok"},
                   {"model_id", model},
                   {"collections", registry.list().size()},
                   {"benchmark_registered", benchmark_loaded}});
      });
    });

    server.Post("/collections", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { create_collection(req, res); });
    });
    server.Get("/collections", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] {
        json list = json::array();
        for (const auto& c : registry.list()) list.push_back(collection_json(*c));
        send_json(res, 200, {{"collections", std::move(list)}});
      });
    });
    server.Put(R"(/collections/([^/]+)/documents)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 guarded(res, [&] { upload_documents(req, res); });
               });
    server.Post(R"(/collections/([^/]+)/search)",
                [this](const httplib::Request& req, httplib::Response& res) {
                  guarded(res, [&] { search(req, res); });
                });
    server.Post("/benchmark/runs", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { start_run(req, res); });
    });
    server.Get(R"(/benchmark/runs/([^/]+))",
               [this](const httplib::Request& req, httplib::Response& res) {
                 guarded(res, [&] { get_run(req, res); });
               });
    server.Get(R"(/pages/([^/]+)/(\d+)\.png)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 guarded(res, [&] { get_page(req, res); });
               });
    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (res.body.empty()) {
        send_error(res, {res.status, res.status == 404 ? "route_not_found" : "invalid_request",
                         "HTTP " + std::to_string(res.status)});
      }
    });
  }

  void create_collection(const httplib::Request& req, httplib::Response& res) {
    const json body = parse_body(req);
    if (!body.contains("name") || !body["name"].is_string() ||
        body["name"].get<std::string>().empty()) {
      throw ApiError{400, "invalid_request", "name must be a non-empty string"};
    }
    const std::string metric_name = body.value("metric", "");
    const auto metric = try_parse_metric(metric_name);
    if (!metric) {
      throw ApiError{400, "invalid_metric",
                     "unknown metric '" + metric_name +
                         "'; expected one of: cosine, dot, euclidean, manhattan",
                     {{"allowed", {"cosine", "dot", "euclidean", "manhattan"}}}};
    }
    const std::size_t dims = positive_int(body, "dims", 0);
    if (dims == 0) throw ApiError{400, "invalid_request", "dims is required"};
    auto c = registry.create(body["name"].get<std::string>(), *metric, dims);
    send_json(res, 201, collection_json(*c));
  }

  void upload_documents(const httplib::Request& req, httplib::Response& res) {
    auto collection = registry.get(req.matches[1]);
    std::istringstream in(req.body);
    auto entries = decode_embeddings(in, req.body.size());
    const std::size_t n = collection->upsert(std::move(entries));
    send_json(res, 200, {{"upserted", n}, {"size", collection->size()}});
  }

  void search(const httplib::Request& req, httplib::Response& res) {
    auto collection = registry.get(req.matches[1]);
    const json body = parse_body(req);
    SearchRequest request{{"", MultiVector(1, 1, {0.0f})}, 5, 25, false};
    request.k = positive_int(body, "k", 5);
    request.candidates = positive_int(body, "candidates", 25);
    if (request.k > request.candidates) {
      throw ApiError{400, "k_exceeds_candidates", "k exceeds candidates"};
    }
    request.explain = body.value("explain", false);

    if (body.contains("query_text") && body["query_text"].is_string()) {
      request.query = embed_query(body["query_text"].get<std::string>(), require_embedder());
    } else if (body.contains("query") && body["query"].is_object()) {
      const json& q = body["query"];
      const std::size_t rows = positive_int(q, "rows", 0);
      const std::size_t dims = positive_int(q, "dims", 0);
      auto data = q.at("data").get<std::vector<float>>();
      request.query = {"", MultiVector(rows, dims, std::move(data))};
    } else {
      throw ApiError{400, "invalid_request", "provide query_text or query"};
    }

    const RankedResult result = collection->search(request);
    json results = json::array();
    for (const auto& e : result.entries) {
      json entry = {{"rank", e.rank},
                    {"volume_id", e.page.volume_id},
                    {"page_number", e.page.page_number},
                    {"score", e.score},
                    {"normalized_score", e.normalized_score}};
      if (!config.images_dir.empty()) {
        std::error_code ec;
        if (fs::is_regular_file(page_image_path(config.images_dir, e.page), ec)) {
          entry["image_url"] = "/pages/" + e.page.volume_id + "/" +
                               std::to_string(e.page.page_number) + ".png";
        }
      }
      if (e.explanation) entry["explanation"] = to_json(*e.explanation);
      results.push_back(std::move(entry));
    }
    send_json(res, 200,
              {{"collection", collection->name()},
               {"metric", to_string(collection->metric())},
               {"k", request.k},
               {"candidates", request.candidates},
               {"query_rows", request.query.embedding.rows()},
               {"results", std::move(results)}});
  }

  void start_run(const httplib::Request& req, httplib::Response& res) {
    const json body = parse_body(req);
    auto run = std::make_shared<Run>();
    run->analysis = body.value("analysis", "benchmark");
    if (run->analysis != "benchmark" && run->analysis != "unbounded") {
      throw ApiError{400, "invalid_request", "analysis must be 'benchmark' or 'unbounded'"};
    }
    if (!body.contains("collections") || !body["collections"].is_array() ||
        body["collections"].empty()) {
      throw ApiError{400, "invalid_request", "collections must be a non-empty array"};
    }
    for (const auto& name : body["collections"]) {
      run->collections.push_back(registry.get(name.get<std::string>()));
    }
    if (body.contains("subset") && !body["subset"].is_null()) {
      const std::string subset = body["subset"].is_string() ? body["subset"].get<std::string>() : "";
      const auto category = eval::try_parse_category(subset);
      if (!category) {
        throw ApiError{400, "invalid_subset", "unknown subset '" + subset + "'"};
      }
      run->options.subset = category;
    }
    run->options.k = positive_int(body, "k", 5);
    run->options.candidates = positive_int(body, "candidates", 25);
    if (run->options.k > run->options.candidates) {
      throw ApiError{400, "k_exceeds_candidates", "k exceeds candidates"};
    }
    run->threshold = body.value("threshold", 0.85);
    if (!(run->threshold > 0.0 && run->threshold <= 1.0)) {
      throw ApiError{400, "invalid_request", "threshold must lie in (0, 1]"};
    }
    run->options.timestamp = body.value("timestamp", utc_now());

    if (body.contains("benchmark_tsv") && body.contains("ground_truth_tsv")) {
      std::istringstream b(body["benchmark_tsv"].get<std::string>());
      std::istringstream g(body["ground_truth_tsv"].get<std::string>());
      run->queries = eval::parse_benchmark(b);
      run->ground_truth = eval::GroundTruth(eval::parse_ground_truth(g));
    } else if (benchmark_loaded) {
      run->queries = benchmark;
      run->ground_truth = eval::GroundTruth(ground_truth);
    } else {
      throw ApiError{409, "benchmark_not_registered",
                     "server has no benchmark; start it with benchmark files or inline them"};
    }
    require_embedder();

    std::size_t selected = 0;
    for (const auto& q : run->queries) {
      selected += !run->options.subset || q.category == *run->options.subset ? 1 : 0;
    }
    run->total = selected * run->collections.size();

    std::lock_guard lock(runs_mutex);
    run->id = "run-" + std::to_string(next_run++);
    runs[run->id] = run;
    queue.push_back(run);
    runs_cv.notify_one();
    send_json(res, 202, {{"run_id", run->id}, {"status", run->status}});
  }

  void get_run(const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(runs_mutex);
    auto it = runs.find(req.matches[1]);
    if (it == runs.end()) {
      throw ApiError{404, "run_not_found", "unknown run id '" + std::string(req.matches[1]) + "'"};
    }
    const Run& run = *it->second;
    json body = {{"run_id", run.id},
                 {"analysis", run.analysis},
                 {"status", run.status},
                 {"progress", {{"completed", run.completed}, {"total", run.total}}}};
    if (run.status == "done") body["reports"] = run.reports;
    if (run.status == "failed") body["error"] = run.error;
    send_json(res, 200, body);
  }

  void get_page(const httplib::Request& req, httplib::Response& res) {
    if (config.images_dir.empty()) {
      throw ApiError{404, "page_not_found", "server has no page images"};
    }
    PageRef page{req.matches[1], static_cast<std::uint32_t>(std::stoul(req.matches[2]))};
    if (page.volume_id.find("..") != std::string::npos) {
      throw ApiError{404, "page_not_found", "no such page"};
    }
    const fs::path path = page_image_path(config.images_dir, page);
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) {
      throw ApiError{404, "page_not_found", "no image for page " + to_string(page)};
    }
    const auto bytes = read_file_bytes(path);
    res.status = 200;
    res.set_content(std::string(bytes.begin(), bytes.end()), "image/png");
  }
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

Service::~Service() = default;

CollectionRegistry& Service::collections() noexcept { return impl_->registry; }

int Service::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) {
    throw Error(ErrorCode::kIo, "cannot bind service on " + host + ":" + std::to_string(port));
  }
  impl_->server_thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void Service::run(const std::string& host, int port) {
  if (!impl_->server.listen(host, port)) {
    throw Error(ErrorCode::kIo, "cannot serve on " + host + ":" + std::to_string(port));
  }
}

void Service::stop() {
  impl_->server.stop();
  if (impl_->server_thread.joinable()) impl_->server_thread.join();
}

}  // namespace folio
