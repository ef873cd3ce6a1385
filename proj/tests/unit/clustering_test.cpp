#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "docroute/bench.hpp"
#include "docroute/clustering.hpp"
#include "docroute/errors.hpp"
#include "test_support.hpp"

using namespace docroute;
using docroute::testing::vec;

namespace {

// Integer vectors / 1024, exact in float32, with pairwise cosines exactly
// 0.9, 0.8, 0.7 (tests/oracles/tightness_vectors.py).
std::vector<EmbeddingVector> cosine_triple() {
  const std::vector<std::vector<int>> rows{
      {1024, 2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
      {921, 309, -193, 252, 64, 3, 0, 0, 0, 0, 0, 0},
      {819, 104, -359, -483, 0, 0, 0, 0, 69, 8, 2, 2},
  };
  std::vector<EmbeddingVector> out;
  for (const auto& r : rows) {
    std::vector<float> v;
    for (int x : r) v.push_back(static_cast<float>(x) / 1024.0f);
    out.push_back(EmbeddingVector::adopt(v));
  }
  return out;
}

std::vector<std::size_t> iota(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

std::vector<EmbeddingVector> fixture_vectors(const docroute::testing::Fixture& f) {
  std::vector<EmbeddingVector> out;
  for (std::size_t i = 0; i < f.labels.size(); ++i) {
    out.push_back(EmbeddingVector::normalized(std::span<const float>(f.points).subspan(i * f.dim, f.dim)));
  }
  return out;
}

}  // namespace

TEST(Tightness, Definitions) {
  const std::vector<EmbeddingVector> one{vec({0.2, 0.3})};
  EXPECT_DOUBLE_EQ(compute_tightness(iota(1), one), 1.0);
  const std::vector<EmbeddingVector> ortho{vec({1, 0}), vec({0, 1})};
  EXPECT_DOUBLE_EQ(compute_tightness(iota(2), ortho), 0.0);
  const auto triple = cosine_triple();
  EXPECT_NEAR(cosine_similarity(triple[0], triple[1]), 0.9, 1e-12);
  EXPECT_NEAR(cosine_similarity(triple[0], triple[2]), 0.8, 1e-12);
  EXPECT_NEAR(cosine_similarity(triple[1], triple[2]), 0.7, 1e-12);
  EXPECT_NEAR(compute_tightness(iota(3), triple), 0.8, 1e-9);
}

TEST(MakeCluster, CentroidIsMean) {
  const std::vector<EmbeddingVector> pts{vec({1, 0}), vec({0, 1}), vec({1, 1})};
  const Cluster c = make_cluster(4, {2, 0}, pts);
  EXPECT_EQ(c.members, (std::vector<std::size_t>{0, 2}));
  EXPECT_NEAR(c.raw_centroid[0], (1.0 + std::sqrt(0.5)) / 2.0, 1e-7);
  EXPECT_NEAR(c.raw_centroid[1], std::sqrt(0.5) / 2.0, 1e-7);
  EXPECT_NEAR(c.centroid.norm(), 1.0, 1e-6);
}

TEST(AssignNoise, NearestCentroidWins) {
  const std::vector<EmbeddingVector> pts{vec({1, 0}), vec({0, 1}), vec({0.9, 0.436})};
  std::vector<Cluster> clusters{make_cluster(0, {0}, pts), make_cluster(1, {1}, pts)};
  const std::vector<std::size_t> noise{2};
  const auto out = assign_noise(noise, clusters, pts);
  EXPECT_EQ(out[0].members, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(out[1].members, (std::vector<std::size_t>{1}));
  EXPECT_LT(out[0].tightness, 1.0);
}

TEST(AssignNoise, ExactCentroidMatch) {
  const std::vector<EmbeddingVector> pts{vec({1, 0, 0}), vec({0, 1, 0}), vec({0, 0, 1}), vec({0, 0, 1})};
  std::vector<Cluster> clusters{make_cluster(0, {0}, pts), make_cluster(1, {1}, pts), make_cluster(2, {2}, pts)};
  const std::vector<std::size_t> noise{3};
  const auto out = assign_noise(noise, clusters, pts);
  EXPECT_EQ(out[2].members, (std::vector<std::size_t>{2, 3}));
}

TEST(AssignNoise, TiesGoToLowerId) {
  const std::vector<EmbeddingVector> pts{vec({1, 0}), vec({0, 1}), vec({1, 1})};
  std::vector<Cluster> clusters{make_cluster(0, {0}, pts), make_cluster(1, {1}, pts)};
  const std::vector<std::size_t> noise{2};
  const auto out = assign_noise(noise, clusters, pts);
  EXPECT_EQ(out[0].size(), 2u);
}

TEST(AssignNoise, EmptyNoiseIsIdentity) {
  const std::vector<EmbeddingVector> pts{vec({1, 0}), vec({0, 1})};
  std::vector<Cluster> clusters{make_cluster(0, {0, 1}, pts)};
  const auto out = assign_noise({}, clusters, pts);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].members, clusters[0].members);
}

TEST(Refine, NoTriggerLeavesClusterAlone) {
  std::vector<EmbeddingVector> pts;
  for (int i = 0; i < 10; ++i) pts.push_back(vec({1.0, 0.01 * i}));
  ClusteringConfig cfg;
  cfg.tightness_floor = 0.5;
  const auto r = refine_large_clusters({make_cluster(0, iota(10), pts)}, pts, cfg);
  EXPECT_EQ(r.refined, 0u);
  ASSERT_EQ(r.clusters.size(), 1u);
  EXPECT_EQ(r.clusters[0].members, iota(10));
}

TEST(Refine, OversizedSplitsIntoCeilParts) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 0.05);
  std::vector<EmbeddingVector> pts;
  for (int i = 0; i < 100; ++i) pts.push_back(vec({1.0 + g(rng), g(rng), g(rng), g(rng)}));
  const auto r = refine_large_clusters({make_cluster(0, iota(100), pts)}, pts, ClusteringConfig{});
  EXPECT_EQ(r.refined, 1u);
  ASSERT_EQ(r.clusters.size(), 3u);
  std::size_t total = 0;
  for (std::size_t i = 0; i < r.clusters.size(); ++i) {
    EXPECT_EQ(r.clusters[i].id, i);
    total += r.clusters[i].size();
  }
  EXPECT_EQ(total, 100u);
}

TEST(Refine, LooseClusterSeparatesBlobs) {
  // Reference partition and tightness from tests/oracles/kmeans_fixture.py.
  const auto f = docroute::testing::load_fixture("kmeans_two_blobs.txt", 2);
  const auto pts = fixture_vectors(f);
  const Cluster merged = make_cluster(0, iota(pts.size()), pts);
  EXPECT_NEAR(merged.tightness, 0.4741, 1e-3);
  const auto r = refine_large_clusters({merged}, pts, ClusteringConfig{});
  ASSERT_EQ(r.clusters.size(), 2u);
  for (const Cluster& c : r.clusters) {
    ASSERT_EQ(c.size(), 10u);
    for (std::size_t m : c.members) EXPECT_EQ(f.labels[m], f.labels[c.members.front()]);
  }
}

TEST(ClusterEmbeddings, PlantedTopicsArePure) {
  SyntheticSpec spec;  // 10 topics x 50, d=64, sigma 0.05
  spec.seed = 3;
  const SyntheticCorpus corpus = synth_corpus(spec);
  const auto outcome = cluster_embeddings(corpus.embeddings, ClusteringConfig{});
  EXPECT_GE(outcome.clusters.size(), 10u);
  std::size_t majority_total = 0;
  std::size_t total = 0;
  for (const Cluster& c : outcome.clusters) {
    std::map<std::uint32_t, std::size_t> counts;
    for (std::size_t m : c.members) ++counts[corpus.labels[m]];
    std::size_t best = 0;
    for (const auto& [label, n] : counts) best = std::max(best, n);
    majority_total += best;
    total += c.size();
  }
  EXPECT_EQ(total, 500u);
  EXPECT_GE(static_cast<double>(majority_total) / static_cast<double>(total), 0.95);
}

TEST(ClusteringConfig, Validation) {
  ClusteringConfig cfg;
  cfg.max_cluster_size = 5;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.max_cluster_size = 6;
  EXPECT_NO_THROW(cfg.validate());
}
