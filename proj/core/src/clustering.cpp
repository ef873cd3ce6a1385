#include "docroute/clustering.hpp"

#include <algorithm>
#include <numeric>

#include "docroute/errors.hpp"

namespace docroute {

void ClusteringConfig::validate() const {
  if (min_cluster_size < 2) fail(ErrorKind::kConfig, "min_cluster_size must be >= 2");
  if (effective_min_samples() < 1) fail(ErrorKind::kConfig, "min_samples must be >= 1");
  if (max_cluster_size <= min_cluster_size) fail(ErrorKind::kConfig, "max_cluster_size must exceed min_cluster_size");
  if (!(tightness_floor >= -1.0 && tightness_floor <= 1.0)) fail(ErrorKind::kConfig, "tightness_floor must be in [-1, 1]");
  if (kmeans_max_iters < 1) fail(ErrorKind::kConfig, "kmeans_max_iters must be >= 1");
  if (!(kmeans_tolerance >= 0.0)) fail(ErrorKind::kConfig, "kmeans_tolerance must be >= 0");
}

std::vector<double> mean_vector(std::span<const std::size_t> members, std::span<const EmbeddingVector> embeddings) {
  if (members.empty()) fail(ErrorKind::kInvalidArgument, "mean of an empty cluster");
  const std::size_t dim = embeddings[members.front()].dim();
  std::vector<double> mean(dim, 0.0);
  for (std::size_t m : members) {
    const auto v = embeddings[m].values();
    for (std::size_t j = 0; j < dim; ++j) mean[j] += static_cast<double>(v[j]);
  }
  for (double& x : mean) x /= static_cast<double>(members.size());
  return mean;
}

double compute_tightness(std::span<const std::size_t> members, std::span<const EmbeddingVector> embeddings) {
  if (members.empty()) fail(ErrorKind::kInvalidArgument, "tightness of an empty cluster");
  if (members.size() == 1) return 1.0;
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      sum += cosine_similarity(embeddings[members[i]], embeddings[members[j]]);
      ++pairs;
    }
  }
  return std::clamp(sum / static_cast<double>(pairs), -1.0, 1.0);
}

double compute_tightness(const Cluster& cluster, std::span<const EmbeddingVector> embeddings) {
  return compute_tightness(cluster.members, embeddings);
}

Cluster make_cluster(std::uint32_t id, std::vector<std::size_t> members, std::span<const EmbeddingVector> embeddings) {
  std::sort(members.begin(), members.end());
  Cluster c;
  c.id = id;
  c.raw_centroid = mean_vector(members, embeddings);
  c.centroid = EmbeddingVector::normalized(std::span<const double>(c.raw_centroid));
  c.tightness = compute_tightness(members, embeddings);
  c.members = std::move(members);
  return c;
}

double weighted_tightness(std::span<const Cluster> clusters) {
  double num = 0.0;
  double den = 0.0;
  for (const Cluster& c : clusters) {
    num += c.tightness * static_cast<double>(c.size());
    den += static_cast<double>(c.size());
  }
  return den == 0.0 ? 0.0 : num / den;
}

std::vector<Cluster> assign_noise(std::span<const std::size_t> noise, std::vector<Cluster> clusters,
                                  std::span<const EmbeddingVector> embeddings) {
  if (clusters.empty()) fail(ErrorKind::kInvalidArgument, "assign_noise needs at least one cluster");
  if (noise.empty()) return clusters;

  std::vector<std::vector<std::size_t>> joined(clusters.size());
  for (std::size_t row : noise) {
    std::size_t best = 0;
    double best_score = -2.0;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      const double s = cosine_similarity(embeddings[row], clusters[c].centroid);
      if (s > best_score) {
        best_score = s;
        best = c;
      }
    }
    joined[best].push_back(row);
  }
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    if (joined[c].empty()) continue;
    std::vector<std::size_t> members = std::move(clusters[c].members);
    members.insert(members.end(), joined[c].begin(), joined[c].end());
    clusters[c] = make_cluster(clusters[c].id, std::move(members), embeddings);
  }
  return clusters;
}

RefinementResult refine_large_clusters(std::vector<Cluster> clusters, std::span<const EmbeddingVector> embeddings,
                                       const ClusteringConfig& config) {
  config.validate();
  RefinementResult out;
  for (Cluster& cluster : clusters) {
    const bool too_big = cluster.size() > config.max_cluster_size;
    const bool too_loose = cluster.tightness < config.tightness_floor;
    if (!(too_big || too_loose) || cluster.size() < 2) {
      cluster.id = static_cast<std::uint32_t>(out.clusters.size());
      out.clusters.push_back(std::move(cluster));
      continue;
    }

    const std::size_t by_size = (cluster.size() + config.max_cluster_size - 1) / config.max_cluster_size;
    const std::size_t k = std::min(cluster.size(), std::max<std::size_t>(2, by_size));
    std::vector<EmbeddingVector> sub;
    sub.reserve(cluster.size());
    for (std::size_t m : cluster.members) sub.push_back(embeddings[m]);
    const KMeansResult km = kmeans(sub, k, config.seed, config.kmeans_max_iters, config.kmeans_tolerance);

    std::vector<std::vector<std::size_t>> parts(k);
    for (std::size_t i = 0; i < cluster.members.size(); ++i) parts[km.assignment[i]].push_back(cluster.members[i]);
    for (auto& part : parts) {
      if (part.empty()) continue;
      out.clusters.push_back(
          make_cluster(static_cast<std::uint32_t>(out.clusters.size()), std::move(part), embeddings));
    }
    ++out.refined;
  }
  return out;
}

ClusteringOutcome cluster_embeddings(std::span<const EmbeddingVector> embeddings, const ClusteringConfig& config) {
  DensityResult density = density_cluster(embeddings, config);
  ClusteringOutcome outcome;
  outcome.diagnostics.density_clusters = density.fallback ? 0 : density.clusters.size();
  outcome.diagnostics.fallback = density.fallback;
  outcome.diagnostics.noise_absorbed = density.noise.size();
  std::vector<Cluster> absorbed = assign_noise(density.noise, std::move(density.clusters), embeddings);
  RefinementResult refined = refine_large_clusters(std::move(absorbed), embeddings, config);
  outcome.diagnostics.refined = refined.refined;
  outcome.clusters = std::move(refined.clusters);
  return outcome;
}

}  // namespace docroute
