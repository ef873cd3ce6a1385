#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "docroute/clustering.hpp"
#include "docroute/errors.hpp"

namespace docroute {

namespace {

// std::uniform_real_distribution is implementation-defined; this mapping is not.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double sq_dist(std::span<const float> p, const std::vector<double>& c) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double diff = static_cast<double>(p[i]) - c[i];
    acc += diff * diff;
  }
  return acc;
}

std::vector<double> to_double(std::span<const float> p) { return {p.begin(), p.end()}; }

}  // namespace

KMeansResult kmeans(std::span<const float> points, std::size_t dim, std::size_t k, std::uint64_t seed,
                    std::uint32_t max_iters, double tolerance) {
  if (dim == 0 || points.size() % dim != 0) fail(ErrorKind::kInvalidArgument, "points are not a multiple of dim");
  const std::size_t n = points.size() / dim;
  if (k < 1 || k > n) {
    fail(ErrorKind::kInvalidArgument, "kmeans needs 1 <= k <= n (k=" + std::to_string(k) + ", n=" +
                                          std::to_string(n) + ")");
  }
  if (max_iters < 1) fail(ErrorKind::kInvalidArgument, "kmeans_max_iters must be >= 1");
  auto row = [&](std::size_t i) { return points.subspan(i * dim, dim); };

  // k-means++ seeding.
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> centroids;
  std::vector<bool> chosen(n, false);
  std::size_t first = std::min(n - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)));
  centroids.push_back(to_double(row(first)));
  chosen[first] = true;
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = sq_dist(row(i), centroids.back());
  while (centroids.size() < k) {
    double total = 0.0;
    for (double v : d2) total += v;
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = uniform01(rng) * total;
      double cum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        cum += d2[i];
        pick = i;
        if (cum > target) break;
      }
    } else {
      (void)uniform01(rng);
      pick = static_cast<std::size_t>(std::find(chosen.begin(), chosen.end(), false) - chosen.begin());
    }
    chosen[pick] = true;
    centroids.push_back(to_double(row(pick)));
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], sq_dist(row(i), centroids.back()));
  }

  KMeansResult result;
  result.assignment.assign(n, 0);
  std::vector<double> cost(n, 0.0);
  for (std::uint32_t iter = 0; iter < max_iters; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      std::uint32_t best_c = 0;
      for (std::size_t c = 0; c < k; ++c) {
        const double d = sq_dist(row(i), centroids[c]);
        if (d < best) {
          best = d;
          best_c = static_cast<std::uint32_t>(c);
        }
      }
      result.assignment[i] = best_c;
      cost[i] = best;
    }

    std::vector<std::size_t> counts(k, 0);
    for (std::uint32_t a : result.assignment) ++counts[a];
    for (std::size_t empty = 0; empty < k; ++empty) {
      if (counts[empty] != 0) continue;
      const std::size_t largest =
          static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (result.assignment[i] == largest && (far == n || cost[i] > cost[far])) far = i;
      }
      result.assignment[far] = static_cast<std::uint32_t>(empty);
      centroids[empty] = to_double(row(far));
      cost[far] = 0.0;
      --counts[largest];
      ++counts[empty];
    }

    double inertia = 0.0;
    for (double c : cost) inertia += c;
    result.inertia_history.push_back(inertia);

    std::vector<std::vector<double>> next(k, std::vector<double>(dim, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      auto& acc = next[result.assignment[i]];
      const auto p = row(i);
      for (std::size_t j = 0; j < dim; ++j) acc[j] += static_cast<double>(p[j]);
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      double moved = 0.0;
      for (std::size_t j = 0; j < dim; ++j) {
        next[c][j] /= static_cast<double>(counts[c]);
        const double diff = next[c][j] - centroids[c][j];
        moved += diff * diff;
      }
      shift = std::max(shift, std::sqrt(moved));
    }
    centroids = std::move(next);
    result.iterations = iter + 1;
    if (shift < tolerance) {
      result.converged = true;
      break;
    }
  }
  result.centroids = std::move(centroids);
  return result;
}

KMeansResult kmeans(std::span<const EmbeddingVector> points, std::size_t k, std::uint64_t seed,
                    std::uint32_t max_iters, double tolerance) {
  if (points.empty()) fail(ErrorKind::kInvalidArgument, "kmeans needs at least one point");
  const std::size_t dim = points.front().dim();
  std::vector<float> flat;
  flat.reserve(points.size() * dim);
  for (const EmbeddingVector& p : points) {
    if (p.dim() != dim) fail(ErrorKind::kDimensionMismatch, "points have mixed dimensions");
    flat.insert(flat.end(), p.values().begin(), p.values().end());
  }
  return kmeans(flat, dim, k, seed, max_iters, tolerance);
}

double within_cluster_ss(std::span<const EmbeddingVector> points, std::span<const std::uint32_t> assignment,
                         std::size_t k) {
  if (points.empty()) return 0.0;
  const std::size_t dim = points.front().dim();
  std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    ++counts[assignment[i]];
    for (std::size_t j = 0; j < dim; ++j) sums[assignment[i]][j] += static_cast<double>(points[i][j]);
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0) continue;
    for (double& v : sums[c]) v /= static_cast<double>(counts[c]);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) total += sq_dist(points[i].values(), sums[assignment[i]]);
  return total;
}

}  // namespace docroute
