#include "http_embedder.hpp"

#include <thread>

#include "docroute/errors.hpp"
#include "httplib.h"
#include "json.hpp"

namespace docroute {

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint split_endpoint(const std::string& url) {
  const std::string scheme = "http://";
  if (url.rfind(scheme, 0) != 0) fail(ErrorKind::kConfig, "endpoint must be an http:// URL: " + url);
  const std::size_t slash = url.find('/', scheme.size());
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

class HttpEmbedder final : public Embedder {
 public:
  HttpEmbedder(ProviderSpec spec, HttpOptions http)
      : spec_(std::move(spec)), http_(http), endpoint_(split_endpoint(spec_.endpoint)) {}

  const ProviderSpec& spec() const override { return spec_; }

 protected:
  std::vector<EmbeddingVector> embed_slice(std::span<const std::string> slice,
                                           std::size_t batch_index) const override {
    using nlohmann::json;
    json request = {{"model", spec_.model_name}, {"inputs", json::array()}};
    for (const std::string& text : slice) request["inputs"].push_back(text);
    const std::string body = request.dump();

    std::string last_error;
    auto backoff = http_.initial_backoff;
    for (std::uint32_t attempt = 0; attempt <= http_.retries; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(backoff);
        backoff *= 2;
      }
      // httplib clients are not safe to share across threads; one per attempt.
      httplib::Client client(endpoint_.origin);
      const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(http_.timeout);
      const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(http_.timeout - seconds);
      client.set_connection_timeout(seconds.count(), micros.count());
      client.set_read_timeout(seconds.count(), micros.count());
      client.set_write_timeout(seconds.count(), micros.count());

      auto res = client.Post(endpoint_.path, body, "application/json");
      if (!res) {
        last_error = httplib::to_string(res.error());
        continue;
      }
      if (res->status != 200) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      return parse_response(res->body, slice.size());
    }
    throw ProviderUnavailable(batch_index, "embedding provider unavailable for batch " + std::to_string(batch_index) +
                                               " after " + std::to_string(http_.retries + 1) +
                                               " attempts: " + last_error);
  }

 private:
  std::vector<EmbeddingVector> parse_response(const std::string& body, std::size_t expected) const {
    using nlohmann::json;
    json doc = json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("embeddings") || !doc["embeddings"].is_array()) {
      fail(ErrorKind::kProtocol, "provider response lacks an 'embeddings' array");
    }
    const json& rows = doc["embeddings"];
    if (rows.size() != expected) {
      fail(ErrorKind::kProtocol, "provider returned " + std::to_string(rows.size()) + " embeddings for " +
                                     std::to_string(expected) + " inputs");
    }
    std::vector<EmbeddingVector> out;
    out.reserve(expected);
    for (const json& row : rows) {
      if (!row.is_array()) fail(ErrorKind::kProtocol, "embedding row is not an array");
      if (row.size() != spec_.dim) {
        fail(ErrorKind::kProtocol, "provider returned dim " + std::to_string(row.size()) + ", expected " +
                                       std::to_string(spec_.dim));
      }
      std::vector<float> values;
      values.reserve(row.size());
      for (const json& v : row) {
        if (!v.is_number()) fail(ErrorKind::kProtocol, "embedding entry is not a number");
        values.push_back(v.get<float>());
      }
      try {
        out.push_back(EmbeddingVector::normalized(std::span<const float>(values)));
      } catch (const Error& e) {
        fail(ErrorKind::kProtocol, std::string("bad embedding from provider: ") + e.what());
      }
    }
    return out;
  }

  ProviderSpec spec_;
  HttpOptions http_;
  Endpoint endpoint_;
};

}  // namespace

std::unique_ptr<Embedder> make_http_embedder(const ProviderSpec& spec, const HttpOptions& http) {
  return std::make_unique<HttpEmbedder>(spec, http);
}

}  // namespace docroute
