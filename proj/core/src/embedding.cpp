#include "docroute/embedding.hpp"

#include <algorithm>
#include <cmath>

#include "docroute/corpus.hpp"
#include "docroute/errors.hpp"
#include "http_embedder.hpp"

namespace docroute {

namespace {

template <typename T>
EmbeddingVector normalize_impl(std::span<const T> raw, auto make) {
  if (raw.empty()) fail(ErrorKind::kInvalidArgument, "embedding must have dim >= 1");
  double sum = 0.0;
  for (T v : raw) {
    if (!std::isfinite(static_cast<double>(v))) fail(ErrorKind::kInvalidArgument, "embedding has non-finite entry");
    sum += static_cast<double>(v) * static_cast<double>(v);
  }
  std::vector<float> out(raw.size(), 0.0f);
  if (sum == 0.0) {
    out[0] = 1.0f;
  } else {
    const double inv = 1.0 / std::sqrt(sum);
    for (std::size_t i = 0; i < raw.size(); ++i) out[i] = static_cast<float>(static_cast<double>(raw[i]) * inv);
  }
  return make(std::move(out));
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

class DeterministicEmbedder final : public Embedder {
 public:
  explicit DeterministicEmbedder(ProviderSpec spec) : spec_(std::move(spec)) {}
  const ProviderSpec& spec() const override { return spec_; }

 protected:
  std::vector<EmbeddingVector> embed_slice(std::span<const std::string> slice, std::size_t) const override {
    std::vector<EmbeddingVector> out;
    out.reserve(slice.size());
    for (const std::string& text : slice) out.push_back(deterministic_embed(text, spec_.dim, spec_.seed));
    return out;
  }

 private:
  ProviderSpec spec_;
};

}  // namespace

EmbeddingVector EmbeddingVector::normalized(std::span<const float> raw) {
  return normalize_impl(raw, [](std::vector<float> v) { return EmbeddingVector(std::move(v)); });
}

EmbeddingVector EmbeddingVector::normalized(std::span<const double> raw) {
  return normalize_impl(raw, [](std::vector<float> v) { return EmbeddingVector(std::move(v)); });
}

EmbeddingVector EmbeddingVector::adopt(std::vector<float> values) {
  if (values.empty()) fail(ErrorKind::kInvalidArgument, "embedding must have dim >= 1");
  for (float v : values) {
    if (!std::isfinite(v)) fail(ErrorKind::kInvalidArgument, "embedding has non-finite entry");
  }
  return EmbeddingVector(std::move(values));
}

double EmbeddingVector::norm() const { return std::sqrt(dot(values_, values_)); }

double dot(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    fail(ErrorKind::kDimensionMismatch,
         "dimension mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return acc;
}

double squared_distance(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    fail(ErrorKind::kDimensionMismatch,
         "dimension mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    acc += diff * diff;
  }
  return acc;
}

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
  const double ab = dot(a, b);
  const double denom = std::sqrt(dot(a, a)) * std::sqrt(dot(b, b));
  if (denom == 0.0) return 0.0;
  return std::clamp(ab / denom, -1.0, 1.0);
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  return cosine_similarity(a.values(), b.values());
}

std::string_view to_string(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::kDeterministicLocal: return "deterministic-local";
    case ProviderKind::kRemoteHttp: return "remote-http";
    case ProviderKind::kPlanted: return "planted";
  }
  return "unknown";
}

ProviderKind parse_provider_kind(std::string_view name) {
  if (name == "deterministic-local") return ProviderKind::kDeterministicLocal;
  if (name == "remote-http") return ProviderKind::kRemoteHttp;
  if (name == "planted") return ProviderKind::kPlanted;
  fail(ErrorKind::kConfig, "unknown embedding provider '" + std::string(name) + "'");
}

void ProviderSpec::validate() const {
  if (dim < 1) fail(ErrorKind::kConfig, "embedding dim must be >= 1");
  if (batch_size < 1) fail(ErrorKind::kConfig, "embedding batch_size must be >= 1");
  if (kind == ProviderKind::kRemoteHttp && endpoint.empty()) {
    fail(ErrorKind::kConfig, "remote-http provider requires an endpoint");
  }
}

bool ProviderSpec::same_model(const ProviderSpec& other) const {
  return kind == other.kind && dim == other.dim && seed == other.seed && model_name == other.model_name;
}

std::uint64_t token_hash(std::string_view token, std::uint64_t seed) {
  return splitmix64(fnv1a64(token) ^ splitmix64(seed));
}

EmbeddingVector deterministic_embed(std::string_view text, std::uint32_t dim, std::uint64_t seed) {
  if (dim < 1) fail(ErrorKind::kInvalidArgument, "embedding dim must be >= 1");
  std::vector<double> acc(dim, 0.0);
  for (const std::string& token : tokenize(text)) {
    const std::uint64_t h = token_hash(token, seed);
    acc[h % dim] += (h >> 63) ? -1.0 : 1.0;
  }
  return EmbeddingVector::normalized(std::span<const double>(acc));
}

std::vector<EmbeddingVector> Embedder::embed_batch(std::span<const std::string> texts) const {
  if (texts.empty()) fail(ErrorKind::kInvalidArgument, "embed_batch needs at least one text");
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (texts[i].empty()) fail(ErrorKind::kInvalidArgument, "text " + std::to_string(i) + " is empty");
  }
  const std::size_t batch = spec().batch_size;
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (std::size_t begin = 0, index = 0; begin < texts.size(); begin += batch, ++index) {
    const auto slice = texts.subspan(begin, std::min(batch, texts.size() - begin));
    std::vector<EmbeddingVector> part = embed_slice(slice, index);
    for (EmbeddingVector& v : part) {
      if (v.dim() != spec().dim) {
        fail(ErrorKind::kProtocol, "provider returned dim " + std::to_string(v.dim()) + ", expected " +
                                       std::to_string(spec().dim));
      }
      out.push_back(std::move(v));
    }
  }
  return out;
}

EmbeddingVector Embedder::embed(std::string_view text) const {
  const std::string owned(text);
  return embed_batch(std::span<const std::string>(&owned, 1)).front();
}

std::unique_ptr<Embedder> make_embedder(const ProviderSpec& spec, const HttpOptions& http) {
  spec.validate();
  switch (spec.kind) {
    case ProviderKind::kDeterministicLocal: return std::make_unique<DeterministicEmbedder>(spec);
    case ProviderKind::kRemoteHttp: return make_http_embedder(spec, http);
    case ProviderKind::kPlanted: break;
  }
  fail(ErrorKind::kConfig, "planted provider cannot embed text; supply query vectors directly");
}

std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts, const ProviderSpec& spec) {
  return make_embedder(spec)->embed_batch(texts);
}

}  // namespace docroute
