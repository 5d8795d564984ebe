#include "folio/embedding_service.hpp"

#include <httplib.h>

#include <thread>

#include "folio/error.hpp"

namespace folio {

struct EmbeddingServiceServer::Impl {
  std::shared_ptr<const Embedder> embedder;
  httplib::Server server;
  std::thread thread;

  void install_routes() {
    server.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(embedder->model_id(), "text/plain");
    });
    server.Post("/embed/image", [this](const httplib::Request& req,
                                       httplib::Response& res) {
      PageImage image;
      image.page.volume_id = req.get_header_value("X-Volume-Id");
      const std::string page = req.get_header_value("X-Page-Number");
      image.png.assign(req.body.begin(), req.body.end());
      try {
        image.page.page_number =
            page.empty() ? 1u : static_cast<std::uint32_t>(std::stoul(page));
        inspect_png(image.png);
        res.set_content(encode_matrix(embedder->embed_image(image)),
                        "application/octet-stream");
      } catch (const std::exception& e) {
        res.status = 400;
        res.set_content(e.what(), "text/plain");
      }
    });
    server.Post("/embed/text", [this](const httplib::Request& req,
                                      httplib::Response& res) {
      try {
        res.set_content(encode_matrix(embed_query(req.body, *embedder).embedding),
                        "application/octet-stream");
      } catch (const std::exception& e) {
        res.status = 400;
        res.set_content(e.what(), "text/plain");
      }
    });
  }
};

EmbeddingServiceServer::EmbeddingServiceServer(std::shared_ptr<const Embedder> embedder)
    : impl_(std::make_unique<Impl>()) {
  impl_->embedder = std::move(embedder);
  impl_->install_routes();
}

EmbeddingServiceServer::~EmbeddingServiceServer() { stop(); }

int EmbeddingServiceServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) {
    throw Error(ErrorCode::kIo, "cannot bind embedding service on " + host + ":" +
                                    std::to_string(port));
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void EmbeddingServiceServer::run(const std::string& host, int port) {
  if (!impl_->server.listen(host, port)) {
    throw Error(ErrorCode::kIo, "cannot serve embedding service on " + host + ":" +
                                    std::to_string(port));
  }
}

void EmbeddingServiceServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace folio
