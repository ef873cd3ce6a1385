#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace docroute {

/// Fixed-dimension float vector with unit L2 norm. All construction paths
/// normalize; the all-zero input maps to the unit vector along axis 0.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;

  static EmbeddingVector normalized(std::span<const float> raw);
  static EmbeddingVector normalized(std::span<const double> raw);

  /// Adopts values that are already unit-norm (e.g. read back from an index).
  /// Only finiteness and non-emptiness are checked.
  static EmbeddingVector adopt(std::vector<float> values);

  std::span<const float> values() const { return values_; }
  std::size_t dim() const { return values_.size(); }
  float operator[](std::size_t i) const { return values_[i]; }
  double norm() const;

  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

 private:
  explicit EmbeddingVector(std::vector<float> values) : values_(std::move(values)) {}
  std::vector<float> values_;
};

double dot(std::span<const float> a, std::span<const float> b);
double squared_distance(std::span<const float> a, std::span<const float> b);

/// dot(a,b) / (|a||b|), accumulated in double. Throws on dimension mismatch.
double cosine_similarity(std::span<const float> a, std::span<const float> b);
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

enum class ProviderKind : std::uint8_t {
  kDeterministicLocal = 0,
  kRemoteHttp = 1,
  // Vectors are supplied by the caller (synthetic corpora); text cannot be embedded.
  kPlanted = 2,
};

std::string_view to_string(ProviderKind kind);
ProviderKind parse_provider_kind(std::string_view name);

/// Identity of the embedding model. Persisted in the index so that queries
/// can be checked against the provider used at ingestion.
struct ProviderSpec {
  ProviderKind kind = ProviderKind::kDeterministicLocal;
  std::uint32_t dim = 1024;
  std::uint64_t seed = 0;
  std::string endpoint;
  std::uint32_t batch_size = 32;
  std::string model_name;

  void validate() const;

  /// Same model as `other`: kind, dim, seed and model name agree. Transport
  /// details (endpoint, batch size) may differ between ingestion and query.
  bool same_model(const ProviderSpec& other) const;

  friend bool operator==(const ProviderSpec&, const ProviderSpec&) = default;
};

struct HttpOptions {
  std::chrono::milliseconds timeout{30'000};
  std::uint32_t retries = 3;
  std::chrono::milliseconds initial_backoff{200};
};

/// Hashed bag-of-words: every token adds +-1 at a seeded hash coordinate.
EmbeddingVector deterministic_embed(std::string_view text, std::uint32_t dim, std::uint64_t seed);

/// 64-bit token hash used by deterministic_embed.
std::uint64_t token_hash(std::string_view token, std::uint64_t seed);

class Embedder {
 public:
  virtual ~Embedder() = default;

  virtual const ProviderSpec& spec() const = 0;

  /// Order-preserving; rejects an empty list or empty strings. Inputs are
  /// sent to the backend in slices of spec().batch_size.
  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const;
  EmbeddingVector embed(std::string_view text) const;

 protected:
  virtual std::vector<EmbeddingVector> embed_slice(std::span<const std::string> slice,
                                                   std::size_t batch_index) const = 0;
};

std::unique_ptr<Embedder> make_embedder(const ProviderSpec& spec, const HttpOptions& http = {});

std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts, const ProviderSpec& spec);

}  // namespace docroute
