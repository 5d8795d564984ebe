#include <httplib.h>

#include <thread>

#include "folio/embedder.hpp"
#include "folio/error.hpp"

namespace folio {

namespace {

std::unique_ptr<httplib::Client> make_client(const std::string& scheme_host_port,
                                             std::chrono::milliseconds timeout) {
  auto client = std::make_unique<httplib::Client>(scheme_host_port);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client->set_connection_timeout(secs.count(), usecs.count());
  client->set_read_timeout(secs.count(), usecs.count());
  client->set_write_timeout(secs.count(), usecs.count());
  return client;
}

}  // namespace

HttpEmbedder::HttpEmbedder(EmbedderConfig config) : config_(std::move(config)) {
  if (config_.max_in_flight == 0) {
    throw Error(ErrorCode::kValidation, "max_in_flight must be at least 1");
  }
  const std::string& url = config_.endpoint;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos || url.substr(0, scheme_end) != "http") {
    throw Error(ErrorCode::kValidation,
                "embedder endpoint must be an http:// URL, got '" + url + "'");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  endpoint_.scheme_host_port = url.substr(0, path_start);
  if (path_start != std::string::npos) {
    endpoint_.base_path = url.substr(path_start);
    while (!endpoint_.base_path.empty() && endpoint_.base_path.back() == '/') {
      endpoint_.base_path.pop_back();
    }
  }
}

MultiVector HttpEmbedder::post(
    const std::string& route, const std::string& body,
    const std::string& content_type,
    const std::vector<std::pair<std::string, std::string>>& headers,
    const std::string& what) const {
  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);

  std::string last_failure;
  for (std::size_t attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(50) * attempt);
    }
    // One client per call: httplib clients are not shared across threads.
    auto client = make_client(endpoint_.scheme_host_port, config_.timeout);
    auto res = client->Post(endpoint_.base_path + route, h, body, content_type);
    if (!res) {
      last_failure = httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_failure = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw Error(ErrorCode::kEmbedderUnavailable,
                  "embedding service rejected " + what + ": HTTP " +
                      std::to_string(res->status) + " " + res->body);
    }
    return decode_matrix(res->body);
  }
  throw Error(ErrorCode::kEmbedderUnavailable,
              "embedding service at " + config_.endpoint + " failed for " + what +
                  " after " + std::to_string(config_.max_retries + 1) +
                  " attempts: " + last_failure);
}

MultiVector HttpEmbedder::embed_image(const PageImage& image) const {
  const std::string body(reinterpret_cast<const char*>(image.png.data()),
                         image.png.size());
  return post("/embed/image", body, "image/png",
              {{"X-Volume-Id", image.page.volume_id},
               {"X-Page-Number", std::to_string(image.page.page_number)}},
              "page " + to_string(image.page));
}

MultiVector HttpEmbedder::embed_text(std::string_view text) const {
  return post("/embed/text", std::string(text), "text/plain; charset=utf-8", {},
              "query text");
}

std::string HttpEmbedder::model_id() const {
  auto client = make_client(endpoint_.scheme_host_port, config_.timeout);
  auto res = client->Get(endpoint_.base_path + "/health");
  if (!res || res->status != 200) {
    throw Error(ErrorCode::kEmbedderUnavailable,
                "embedding service at " + config_.endpoint + " is not healthy");
  }
  std::string id = res->body;
  while (!id.empty() && (id.back() == '\n' || id.back() == '\r')) id.pop_back();
  return id;
}

}  // namespace folio
