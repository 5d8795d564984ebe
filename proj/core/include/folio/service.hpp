#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "folio/collection.hpp"
#include "folio/embedder.hpp"

namespace folio {

struct ServiceConfig {
  // Embeds text queries and benchmark queries; may be null, in which case
  // only raw-matrix searches work.
  std::shared_ptr<const Embedder> embedder;
  // Page PNGs at <images_dir>/<volume>/<page>.png; empty disables /pages.
  std::filesystem::path images_dir;
  // Registered benchmark and ground truth for /benchmark/runs.
  std::filesystem::path benchmark_file;
  std::filesystem::path ground_truth_file;
};

// HTTP/JSON front end over a CollectionRegistry. Routes:
//   GET  /health
//   POST /collections                      {"name","metric","dims"}
//   GET  /collections
//   PUT  /collections/{name}/documents     body: MVE1 embedding file
//   POST /collections/{name}/search        {"query_text"|"query", "k",
//                                           "candidates", "explain"}
//   POST /benchmark/runs                   {"collections", "subset", "k",
//                                           "candidates", "analysis",
//                                           "threshold"}
//   GET  /benchmark/runs/{id}
//   GET  /pages/{volume_id}/{page_number}.png
// Errors are {"error": {"code", "message", "detail"}}.
class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  CollectionRegistry& collections() noexcept;

  // Binds (port 0 picks a free port) and serves on a background thread;
  // returns the port. Throws kIo when binding fails.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  // Serves on the calling thread until stop().
  void run(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace folio
