#include "docroute/index.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

#include "docroute/errors.hpp"

namespace docroute {

namespace {

[[noreturn]] void broken(const std::string& what) { fail(ErrorKind::kInvariantViolation, "index invariant: " + what); }

}  // namespace

std::vector<std::string> ExpertIndex::member_ids(const IndexedCluster& cluster) const {
  std::vector<std::string> ids;
  ids.reserve(cluster.size);
  for (std::uint32_t r = cluster.begin; r < cluster.begin + cluster.size; ++r) ids.push_back(chunks[r].chunk_id);
  return ids;
}

std::uint32_t ExpertIndex::cluster_of(std::size_t row) const {
  auto it = std::upper_bound(clusters.begin(), clusters.end(), row,
                             [](std::size_t r, const IndexedCluster& c) { return r < c.begin; });
  if (it == clusters.begin()) broken("row " + std::to_string(row) + " precedes every cluster");
  return std::prev(it)->id;
}

IndexStats compute_stats(std::span<const IndexedCluster> clusters, std::uint32_t dim, std::uint64_t noise_absorbed) {
  IndexStats s;
  s.clusters = static_cast<std::uint32_t>(clusters.size());
  s.dim = dim;
  s.noise_absorbed = noise_absorbed;
  std::map<std::uint32_t, std::uint32_t> histogram;
  double weighted = 0.0;
  for (const IndexedCluster& c : clusters) {
    s.chunks += c.size;
    weighted += c.tightness * static_cast<double>(c.size);
    ++histogram[c.size];
  }
  s.mean_tightness = s.chunks == 0 ? 0.0 : weighted / static_cast<double>(s.chunks);
  s.size_histogram.assign(histogram.begin(), histogram.end());
  return s;
}

void ExpertIndex::validate() const {
  if (version != kIndexFormatVersion) broken("unsupported version " + std::to_string(version));
  if (provider.dim < 1) broken("dim must be >= 1");
  if (clusters.empty()) broken("M must be >= 1");
  if (vectors.size() != chunks.size() * dim()) broken("vector store size does not match N x d");

  std::unordered_set<std::string_view> ids;
  for (const Chunk& c : chunks) {
    if (!ids.insert(c.chunk_id).second) broken("duplicate chunk id " + c.chunk_id);
  }
  for (std::size_t r = 0; r < chunks.size(); ++r) {
    const auto v = vector(r);
    for (float x : v) {
      if (!std::isfinite(x)) broken("non-finite vector entry in row " + std::to_string(r));
    }
    if (std::abs(std::sqrt(dot(v, v)) - 1.0) > 1e-5) broken("row " + std::to_string(r) + " is not unit-norm");
  }

  std::size_t expected_begin = 0;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    const IndexedCluster& c = clusters[i];
    const std::string label = "cluster " + std::to_string(i);
    if (c.id != i) broken(label + " has id " + std::to_string(c.id));
    if (c.size == 0) broken(label + " is empty");
    if (c.begin != expected_begin) broken(label + " does not start where the previous ended");
    expected_begin += c.size;
    if (expected_begin > chunks.size()) broken(label + " runs past the chunk store");
    if (c.raw_centroid.size() != dim() || c.centroid.dim() != dim()) broken(label + " centroid has wrong dim");

    std::vector<double> mean(dim(), 0.0);
    for (std::uint32_t r = c.begin; r < c.begin + c.size; ++r) {
      const auto v = vector(r);
      for (std::size_t j = 0; j < dim(); ++j) mean[j] += static_cast<double>(v[j]);
    }
    for (double& x : mean) x /= static_cast<double>(c.size);
    for (std::size_t j = 0; j < dim(); ++j) {
      if (std::abs(static_cast<double>(c.raw_centroid[j]) - mean[j]) > 1e-6) broken(label + " centroid is not the member mean");
    }
    const EmbeddingVector normalized = EmbeddingVector::normalized(std::span<const double>(mean));
    for (std::size_t j = 0; j < dim(); ++j) {
      if (std::abs(normalized[j] - c.centroid[j]) > 1e-6) broken(label + " routing centroid is not normalized mean");
    }

    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::uint32_t a = c.begin; a < c.begin + c.size; ++a) {
      for (std::uint32_t b = a + 1; b < c.begin + c.size; ++b) {
        sum += cosine_similarity(vector(a), vector(b));
        ++pairs;
      }
    }
    const double tightness = pairs == 0 ? 1.0 : std::clamp(sum / static_cast<double>(pairs), -1.0, 1.0);
    if (std::abs(tightness - c.tightness) > 1e-9) broken(label + " tightness does not match its members");
  }
  if (expected_begin != chunks.size()) broken("clusters do not cover the chunk store (N != sum of sizes)");

  if (compute_stats(clusters, dim(), stats.noise_absorbed) != stats) broken("stored stats differ from recomputed stats");
}

std::unordered_map<std::string, std::size_t> chunk_rows(const ExpertIndex& index) {
  std::unordered_map<std::string, std::size_t> rows;
  rows.reserve(index.chunks.size());
  for (std::size_t r = 0; r < index.chunks.size(); ++r) rows.emplace(index.chunks[r].chunk_id, r);
  return rows;
}

ExpertIndex build_index_from_embeddings(std::vector<Chunk> chunks, std::span<const EmbeddingVector> embeddings,
                                        const ProviderSpec& provider, const ChunkParams& chunking,
                                        const ClusteringConfig& clustering, BuildReport* report) {
  provider.validate();
  chunking.validate();
  clustering.validate();
  if (chunks.empty()) fail(ErrorKind::kEmptyCorpus, "no chunks to index");
  if (chunks.size() != embeddings.size()) {
    fail(ErrorKind::kInvalidArgument, "got " + std::to_string(embeddings.size()) + " embeddings for " +
                                          std::to_string(chunks.size()) + " chunks");
  }
  for (const EmbeddingVector& e : embeddings) {
    if (e.dim() != provider.dim) {
      fail(ErrorKind::kDimensionMismatch, "embedding dim " + std::to_string(e.dim()) + " != provider dim " +
                                              std::to_string(provider.dim));
    }
  }

  ClusteringOutcome outcome = cluster_embeddings(embeddings, clustering);

  ExpertIndex index;
  index.provider = provider;
  index.chunking = chunking;
  index.clustering = clustering;
  index.chunks.reserve(chunks.size());
  index.vectors.reserve(chunks.size() * provider.dim);
  for (const Cluster& cluster : outcome.clusters) {
    IndexedCluster stored;
    stored.id = cluster.id;
    stored.begin = static_cast<std::uint32_t>(index.chunks.size());
    stored.size = static_cast<std::uint32_t>(cluster.size());
    stored.raw_centroid.assign(cluster.raw_centroid.begin(), cluster.raw_centroid.end());
    stored.centroid = cluster.centroid;
    stored.tightness = cluster.tightness;
    for (std::size_t m : cluster.members) {
      index.chunks.push_back(chunks[m]);
      const auto v = embeddings[m].values();
      index.vectors.insert(index.vectors.end(), v.begin(), v.end());
    }
    index.clusters.push_back(std::move(stored));
  }
  index.stats = compute_stats(index.clusters, provider.dim, outcome.diagnostics.noise_absorbed);

  if (report != nullptr) {
    report->diagnostics = outcome.diagnostics;
    report->warnings.clear();
    if (index.clusters.size() == 1 && index.size() >= 2 * static_cast<std::size_t>(clustering.min_cluster_size)) {
      report->warnings.push_back("only one cluster was formed for " + std::to_string(index.size()) +
                                 " chunks; routing degenerates to a flat scan");
    }
  }
  return index;
}

ExpertIndex build_index(const std::vector<Document>& corpus, const ChunkParams& chunking, const Embedder& embedder,
                        const ClusteringConfig& clustering, BuildReport* report) {
  if (corpus.empty()) fail(ErrorKind::kEmptyCorpus, "corpus is empty");
  std::vector<Chunk> chunks = chunk_corpus(corpus, chunking);
  if (chunks.empty()) fail(ErrorKind::kEmptyCorpus, "corpus produced no chunks");
  std::vector<std::string> texts;
  texts.reserve(chunks.size());
  for (const Chunk& c : chunks) texts.push_back(c.text);
  const std::vector<EmbeddingVector> embeddings = embedder.embed_batch(texts);
  return build_index_from_embeddings(std::move(chunks), embeddings, embedder.spec(), chunking, clustering, report);
}

ExpertIndex build_index(const std::vector<Document>& corpus, const ChunkParams& chunking,
                        const ProviderSpec& provider, const ClusteringConfig& clustering, BuildReport* report) {
  return build_index(corpus, chunking, *make_embedder(provider), clustering, report);
}

}  // namespace docroute
