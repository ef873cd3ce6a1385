#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "docroute/embedding.hpp"

namespace docroute {

struct ClusteringConfig {
  std::uint32_t min_cluster_size = 5;
  std::optional<std::uint32_t> min_samples;  // unset: follows min_cluster_size
  std::uint32_t max_cluster_size = 40;
  double tightness_floor = 0.6;
  std::uint32_t kmeans_max_iters = 100;
  double kmeans_tolerance = 1e-4;
  std::uint64_t seed = 0;

  std::uint32_t effective_min_samples() const { return min_samples.value_or(min_cluster_size); }
  void validate() const;

  friend bool operator==(const ClusteringConfig&, const ClusteringConfig&) = default;
};

/// A document expert: member rows of an embedding set plus their mean.
struct Cluster {
  std::uint32_t id = 0;
  std::vector<std::size_t> members;  // ascending row indices
  std::vector<double> raw_centroid;  // arithmetic mean of member vectors
  EmbeddingVector centroid;          // normalized copy used for routing
  double tightness = 1.0;            // mean pairwise cosine among members

  std::size_t size() const { return members.size(); }
};

std::vector<double> mean_vector(std::span<const std::size_t> members, std::span<const EmbeddingVector> embeddings);

/// Mean cosine over unordered member pairs; 1.0 for a singleton.
double compute_tightness(std::span<const std::size_t> members, std::span<const EmbeddingVector> embeddings);
double compute_tightness(const Cluster& cluster, std::span<const EmbeddingVector> embeddings);

/// Sorts members and fills centroid and tightness.
Cluster make_cluster(std::uint32_t id, std::vector<std::size_t> members,
                     std::span<const EmbeddingVector> embeddings);

/// Size-weighted mean of cluster tightness.
double weighted_tightness(std::span<const Cluster> clusters);

// ---------------------------------------------------------------------------
// Density stage

struct HdbscanParams {
  std::uint32_t min_cluster_size = 5;
  std::uint32_t min_samples = 5;  // neighbourhood size for core distances, self included
};

/// HDBSCAN over Euclidean distance on row-major `points`. Returns one label
/// per row: -1 for noise, otherwise 0.. in condensed-tree order. Excess of
/// mass selection; the root is never selected as a cluster.
std::vector<int> hdbscan_labels(std::span<const float> points, std::size_t dim, const HdbscanParams& params);

struct DensityResult {
  std::vector<Cluster> clusters;
  std::vector<std::size_t> noise;
  bool fallback = false;  // everything placed in one cluster
};

/// HDBSCAN over the normalized embeddings. Falls back to one cluster holding
/// every point when there are fewer points than min_cluster_size or when no
/// cluster survives selection.
DensityResult density_cluster(std::span<const EmbeddingVector> embeddings, const ClusteringConfig& config);

// ---------------------------------------------------------------------------
// KMeans

struct KMeansResult {
  std::vector<std::uint32_t> assignment;
  std::vector<std::vector<double>> centroids;
  std::vector<double> inertia_history;  // within-cluster sum of squares per iteration
  std::uint32_t iterations = 0;
  bool converged = false;
};

/// Lloyd's algorithm with seeded k-means++ initialization. Empty clusters are
/// repaired by moving the farthest point of the largest cluster into them.
KMeansResult kmeans(std::span<const float> points, std::size_t dim, std::size_t k, std::uint64_t seed,
                    std::uint32_t max_iters, double tolerance);
KMeansResult kmeans(std::span<const EmbeddingVector> points, std::size_t k, std::uint64_t seed,
                    std::uint32_t max_iters, double tolerance);

/// Within-cluster sum of squared Euclidean distances to member means.
double within_cluster_ss(std::span<const EmbeddingVector> points, std::span<const std::uint32_t> assignment,
                         std::size_t k);

// ---------------------------------------------------------------------------
// Pipeline steps

/// Each noise row joins the cluster whose normalized centroid has the highest
/// cosine with it (ties: lower cluster id). Centroids and tightness are
/// recomputed afterwards.
std::vector<Cluster> assign_noise(std::span<const std::size_t> noise, std::vector<Cluster> clusters,
                                  std::span<const EmbeddingVector> embeddings);

struct RefinementResult {
  std::vector<Cluster> clusters;  // ids reassigned densely from 0
  std::size_t refined = 0;        // how many input clusters were split
};

/// One pass: clusters larger than max_cluster_size or looser than
/// tightness_floor are split by KMeans with k = max(2, ceil(size / max)).
RefinementResult refine_large_clusters(std::vector<Cluster> clusters, std::span<const EmbeddingVector> embeddings,
                                       const ClusteringConfig& config);

struct ClusteringDiagnostics {
  std::size_t density_clusters = 0;
  std::size_t noise_absorbed = 0;
  bool fallback = false;
  std::size_t refined = 0;
};

struct ClusteringOutcome {
  std::vector<Cluster> clusters;
  ClusteringDiagnostics diagnostics;
};

/// density_cluster -> assign_noise -> refine_large_clusters.
ClusteringOutcome cluster_embeddings(std::span<const EmbeddingVector> embeddings, const ClusteringConfig& config);

}  // namespace docroute
