#pragma once

#include <memory>
#include <string>

#include "folio/embedder.hpp"

namespace folio {

// Serves any Embedder over the embedding-service wire protocol (see
// HttpEmbedder). With a MockEmbedder behind it this is the desk-scale model
// server.
class EmbeddingServiceServer {
 public:
  explicit EmbeddingServiceServer(std::shared_ptr<const Embedder> embedder);
  ~EmbeddingServiceServer();

  EmbeddingServiceServer(const EmbeddingServiceServer&) = delete;
  EmbeddingServiceServer& operator=(const EmbeddingServiceServer&) = delete;

  // Binds (port 0 picks a free port) and serves on a background thread.
  // Returns the bound port; throws kIo when binding fails.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  // Binds and serves on the calling thread until stop().
  void run(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace folio
