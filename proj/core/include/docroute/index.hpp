#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "docroute/clustering.hpp"
#include "docroute/corpus.hpp"
#include "docroute/embedding.hpp"

namespace docroute {

inline constexpr std::uint32_t kIndexFormatVersion = 1;

/// A cluster as stored in the index: a contiguous block of the chunk store.
struct IndexedCluster {
  std::uint32_t id = 0;
  std::uint32_t begin = 0;
  std::uint32_t size = 0;
  std::vector<float> raw_centroid;
  EmbeddingVector centroid;
  double tightness = 1.0;

  friend bool operator==(const IndexedCluster&, const IndexedCluster&) = default;
};

struct IndexStats {
  std::uint32_t clusters = 0;  // M
  std::uint64_t chunks = 0;    // N
  std::uint32_t dim = 0;       // d
  double mean_tightness = 0.0;  // size-weighted
  std::vector<std::pair<std::uint32_t, std::uint32_t>> size_histogram;  // (size, count), ascending size
  std::uint64_t noise_absorbed = 0;

  friend bool operator==(const IndexStats&, const IndexStats&) = default;
};

/// The routing artifact: M centroids plus per-cluster chunk stores. Chunks
/// and vectors are laid out cluster by cluster so a query only touches the
/// blocks of the clusters it selects.
struct ExpertIndex {
  std::uint32_t version = kIndexFormatVersion;
  ProviderSpec provider;
  ChunkParams chunking;
  ClusteringConfig clustering;
  std::vector<Chunk> chunks;
  std::vector<float> vectors;  // row-major, chunks.size() x provider.dim
  std::vector<IndexedCluster> clusters;
  IndexStats stats;

  std::size_t size() const { return chunks.size(); }
  std::uint32_t dim() const { return provider.dim; }
  std::span<const float> vector(std::size_t row) const {
    return std::span<const float>(vectors).subspan(row * dim(), dim());
  }
  std::vector<std::string> member_ids(const IndexedCluster& cluster) const;
  /// Cluster id owning a chunk-store row.
  std::uint32_t cluster_of(std::size_t row) const;

  /// Throws kInvariantViolation describing the first broken invariant.
  void validate() const;

  friend bool operator==(const ExpertIndex&, const ExpertIndex&) = default;
};

IndexStats compute_stats(std::span<const IndexedCluster> clusters, std::uint32_t dim, std::uint64_t noise_absorbed);

std::unordered_map<std::string, std::size_t> chunk_rows(const ExpertIndex& index);

struct BuildReport {
  ClusteringDiagnostics diagnostics;
  std::vector<std::string> warnings;
};

/// Clusters pre-computed embeddings (one per chunk) into an index.
ExpertIndex build_index_from_embeddings(std::vector<Chunk> chunks, std::span<const EmbeddingVector> embeddings,
                                        const ProviderSpec& provider, const ChunkParams& chunking,
                                        const ClusteringConfig& clustering, BuildReport* report = nullptr);

ExpertIndex build_index(const std::vector<Document>& corpus, const ChunkParams& chunking, const Embedder& embedder,
                        const ClusteringConfig& clustering, BuildReport* report = nullptr);

ExpertIndex build_index(const std::vector<Document>& corpus, const ChunkParams& chunking,
                        const ProviderSpec& provider, const ClusteringConfig& clustering,
                        BuildReport* report = nullptr);

/// Little-endian, length-prefixed sections, trailing CRC-32.
std::string serialize_index(const ExpertIndex& index);

/// Checks magic, then version, then checksum, then every index invariant.
ExpertIndex deserialize_index(std::string_view bytes);

void save_index(const ExpertIndex& index, const std::filesystem::path& path);
ExpertIndex load_index(const std::filesystem::path& path);

}  // namespace docroute
