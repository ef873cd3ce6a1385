// HDBSCAN: core distances -> mutual reachability MST -> single-linkage
// hierarchy -> condensed tree -> excess-of-mass selection -> labels.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "docroute/clustering.hpp"
#include "docroute/errors.hpp"

namespace docroute {

namespace {

// Merges at distance zero (duplicate points) would give lambda = inf and
// poison stability sums with inf - inf.
constexpr double kMinDistance = 1e-12;

struct Edge {
  std::size_t a;
  std::size_t b;
  double weight;
};

struct MergeNode {
  std::size_t left;
  std::size_t right;
  double distance;
  std::size_t size;
};

struct CondensedRow {
  std::size_t parent;
  std::size_t child;
  double lambda;
  std::size_t size;
};

std::vector<double> pairwise_distances(std::span<const float> points, std::size_t n, std::size_t dim) {
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto pi = points.subspan(i * dim, dim);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = std::sqrt(squared_distance(pi, points.subspan(j * dim, dim)));
      dist[i * n + j] = d;
      dist[j * n + i] = d;
    }
  }
  return dist;
}

std::vector<double> core_distances(const std::vector<double>& dist, std::size_t n, std::size_t min_samples) {
  const std::size_t kth = std::min(min_samples, n) - 1;  // row includes the point itself at distance 0
  std::vector<double> core(n);
  std::vector<double> row(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy(dist.begin() + static_cast<std::ptrdiff_t>(i * n), dist.begin() + static_cast<std::ptrdiff_t>((i + 1) * n),
              row.begin());
    std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(kth), row.end());
    core[i] = row[kth];
  }
  return core;
}

// Prim's algorithm on the dense mutual-reachability graph.
std::vector<Edge> mutual_reachability_mst(const std::vector<double>& dist, const std::vector<double>& core,
                                          std::size_t n) {
  auto reach = [&](std::size_t i, std::size_t j) { return std::max({core[i], core[j], dist[i * n + j]}); };
  std::vector<Edge> edges;
  edges.reserve(n - 1);
  std::vector<bool> in_tree(n, false);
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> from(n, 0);
  std::size_t current = 0;
  in_tree[0] = true;
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t next = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (in_tree[j]) continue;
      const double w = reach(current, j);
      if (w < best[j]) {
        best[j] = w;
        from[j] = current;
      }
      if (next == n || best[j] < best[next]) next = j;
    }
    in_tree[next] = true;
    edges.push_back({from[next], next, best[next]});
    current = next;
  }
  std::stable_sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) { return x.weight < y.weight; });
  return edges;
}

// Node ids: 0..n-1 are points, n + i is the merge produced by edge i.
std::vector<MergeNode> single_linkage(const std::vector<Edge>& edges, std::size_t n) {
  std::vector<std::size_t> parent(2 * n - 1);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  std::vector<std::size_t> size(2 * n - 1, 1);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  std::vector<MergeNode> merges;
  merges.reserve(n - 1);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::size_t ra = find(edges[i].a);
    const std::size_t rb = find(edges[i].b);
    const std::size_t node = n + i;
    size[node] = size[ra] + size[rb];
    parent[ra] = node;
    parent[rb] = node;
    merges.push_back({ra, rb, edges[i].weight, size[node]});
  }
  return merges;
}

class CondensedTree {
 public:
  CondensedTree(const std::vector<MergeNode>& merges, std::size_t n, std::size_t min_cluster_size)
      : merges_(merges), n_(n) {
    build(min_cluster_size);
  }

  const std::vector<CondensedRow>& rows() const { return rows_; }
  std::size_t root() const { return n_; }
  std::size_t label_count() const { return next_label_; }

 private:
  std::size_t node_size(std::size_t node) const { return node < n_ ? 1 : merges_[node - n_].size; }

  void collect_points(std::size_t node, std::vector<std::size_t>& out) const {
    std::vector<std::size_t> stack{node};
    while (!stack.empty()) {
      const std::size_t cur = stack.back();
      stack.pop_back();
      if (cur < n_) {
        out.push_back(cur);
      } else {
        stack.push_back(merges_[cur - n_].right);
        stack.push_back(merges_[cur - n_].left);
      }
    }
  }

  void drop_points(std::size_t parent_label, std::size_t node, double lambda) {
    std::vector<std::size_t> pts;
    collect_points(node, pts);
    std::sort(pts.begin(), pts.end());
    for (std::size_t p : pts) rows_.push_back({parent_label, p, lambda, 1});
  }

  void build(std::size_t min_cluster_size) {
    const std::size_t top = 2 * n_ - 2;
    std::vector<std::size_t> relabel(2 * n_ - 1, 0);
    relabel[top] = n_;
    next_label_ = n_ + 1;

    // Breadth-first so that cluster labels are a topological order.
    std::vector<std::size_t> queue{top};
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t node = queue[head];
      const MergeNode& m = merges_[node - n_];
      const double lambda = 1.0 / std::max(m.distance, kMinDistance);
      const std::size_t left_count = node_size(m.left);
      const std::size_t right_count = node_size(m.right);
      const std::size_t label = relabel[node];

      const bool left_big = left_count >= min_cluster_size;
      const bool right_big = right_count >= min_cluster_size;
      if (left_big && right_big) {
        relabel[m.left] = next_label_++;
        rows_.push_back({label, relabel[m.left], lambda, left_count});
        relabel[m.right] = next_label_++;
        rows_.push_back({label, relabel[m.right], lambda, right_count});
      } else if (!left_big && !right_big) {
        drop_points(label, m.left, lambda);
        drop_points(label, m.right, lambda);
        continue;
      } else if (!left_big) {
        relabel[m.right] = label;
        drop_points(label, m.left, lambda);
      } else {
        relabel[m.left] = label;
        drop_points(label, m.right, lambda);
      }
      for (std::size_t child : {m.left, m.right}) {
        if (child >= n_ && node_size(child) >= min_cluster_size) queue.push_back(child);
      }
    }
  }

  const std::vector<MergeNode>& merges_;
  std::size_t n_;
  std::size_t next_label_ = 0;
  std::vector<CondensedRow> rows_;
};

}  // namespace

std::vector<int> hdbscan_labels(std::span<const float> points, std::size_t dim, const HdbscanParams& params) {
  if (dim == 0 || points.size() % dim != 0) fail(ErrorKind::kInvalidArgument, "points are not a multiple of dim");
  if (params.min_cluster_size < 2) fail(ErrorKind::kInvalidArgument, "min_cluster_size must be >= 2");
  if (params.min_samples < 1) fail(ErrorKind::kInvalidArgument, "min_samples must be >= 1");
  const std::size_t n = points.size() / dim;
  std::vector<int> labels(n, -1);
  if (n < 2) return labels;

  const std::vector<double> dist = pairwise_distances(points, n, dim);
  const std::vector<double> core = core_distances(dist, n, params.min_samples);
  const std::vector<MergeNode> merges = single_linkage(mutual_reachability_mst(dist, core, n), n);
  const CondensedTree tree(merges, n, params.min_cluster_size);

  const std::size_t root = tree.root();
  const std::size_t labels_total = tree.label_count();
  std::vector<double> birth(labels_total, 0.0);
  std::vector<std::vector<std::size_t>> children(labels_total);
  for (const CondensedRow& row : tree.rows()) {
    if (row.size > 1) {
      birth[row.child] = row.lambda;
      children[row.parent].push_back(row.child);
    }
  }
  std::vector<double> stability(labels_total, 0.0);
  for (const CondensedRow& row : tree.rows()) {
    stability[row.parent] += (row.lambda - birth[row.parent]) * static_cast<double>(row.size);
  }

  // Excess of mass, leaves upward. Cluster ids only exist in [root, labels_total).
  std::vector<bool> selected(labels_total, false);
  for (std::size_t c = labels_total - 1; c > root; --c) {
    double subtree = 0.0;
    for (std::size_t child : children[c]) subtree += stability[child];
    if (subtree > stability[c]) {
      stability[c] = subtree;
    } else {
      selected[c] = true;
      std::vector<std::size_t> stack(children[c].begin(), children[c].end());
      while (!stack.empty()) {
        const std::size_t sub = stack.back();
        stack.pop_back();
        selected[sub] = false;
        stack.insert(stack.end(), children[sub].begin(), children[sub].end());
      }
    }
  }

  // Each point takes the nearest selected ancestor of the cluster it fell out of.
  std::vector<std::size_t> parent_of(labels_total, root);
  for (const CondensedRow& row : tree.rows()) {
    if (row.size > 1) parent_of[row.child] = row.parent;
  }
  std::vector<int> label_of(labels_total, -1);
  int next = 0;
  for (std::size_t c = root + 1; c < labels_total; ++c) {
    if (selected[c]) label_of[c] = next++;
  }
  for (const CondensedRow& row : tree.rows()) {
    if (row.size != 1) continue;
    std::size_t c = row.parent;
    while (c != root && !selected[c]) c = parent_of[c];
    labels[row.child] = c == root ? -1 : label_of[c];
  }
  return labels;
}

DensityResult density_cluster(std::span<const EmbeddingVector> embeddings, const ClusteringConfig& config) {
  config.validate();
  if (embeddings.empty()) fail(ErrorKind::kInvalidArgument, "density_cluster needs at least one embedding");
  const std::size_t n = embeddings.size();
  const std::size_t dim = embeddings.front().dim();

  DensityResult result;
  auto fallback = [&] {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    result.clusters.clear();
    result.clusters.push_back(make_cluster(0, std::move(all), embeddings));
    result.noise.clear();
    result.fallback = true;
    return result;
  };
  if (n < config.min_cluster_size) return fallback();

  std::vector<float> flat;
  flat.reserve(n * dim);
  for (const EmbeddingVector& v : embeddings) {
    if (v.dim() != dim) fail(ErrorKind::kDimensionMismatch, "embeddings have mixed dimensions");
    flat.insert(flat.end(), v.values().begin(), v.values().end());
  }
  const std::vector<int> labels =
      hdbscan_labels(flat, dim, {config.min_cluster_size, config.effective_min_samples()});
  const int count = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  if (count == 0) return fallback();

  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] < 0) {
      result.noise.push_back(i);
    } else {
      members[static_cast<std::size_t>(labels[i])].push_back(i);
    }
  }
  for (std::size_t c = 0; c < members.size(); ++c) {
    result.clusters.push_back(make_cluster(static_cast<std::uint32_t>(c), std::move(members[c]), embeddings));
  }
  return result;
}

}  // namespace docroute
