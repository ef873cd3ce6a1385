#include <gtest/gtest.h>

#include "docroute/bench.hpp"
#include "docroute/errors.hpp"
#include "docroute/index.hpp"
#include "index_fixture.hpp"
#include "test_support.hpp"

using namespace docroute;
using docroute::testing::TempDir;

namespace {

ErrorKind load_error(std::string_view bytes) {
  try {
    deserialize_index(bytes);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "deserialize_index accepted bad bytes";
  return ErrorKind::kInvalidArgument;
}

std::string words(std::size_t n, const std::string& stem) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += stem + std::to_string(i % 17) + " ";
  return s;
}

std::vector<Document> small_corpus() {
  std::vector<Document> docs;
  const char* stems[] = {"alpha", "beta", "gamma"};
  for (int d = 0; d < 12; ++d) docs.push_back({"doc" + std::to_string(d), std::nullopt, words(120, stems[d % 3])});
  return docs;
}

ExpertIndex synthetic_index() {
  SyntheticSpec spec;
  spec.chunks_per_topic = 20;
  return build_synthetic_index(synth_corpus(spec), ClusteringConfig{});
}

}  // namespace

TEST(BuildIndex, SingleShortDocument) {
  ProviderSpec provider;
  provider.dim = 32;
  const std::vector<Document> docs{{"only", std::nullopt, words(100, "w")}};
  const ExpertIndex index = build_index(docs, ChunkParams{}, provider, ClusteringConfig{});
  EXPECT_EQ(index.size(), 1u);
  ASSERT_EQ(index.clusters.size(), 1u);
  const auto expected = deterministic_embed(index.chunks[0].text, 32, 0);
  EXPECT_EQ(index.clusters[0].centroid, expected);
  EXPECT_DOUBLE_EQ(index.clusters[0].tightness, 1.0);
  EXPECT_EQ(index.stats.clusters, 1u);
  EXPECT_EQ(index.stats.chunks, 1u);
}

TEST(BuildIndex, ChunksAreClusterContiguous) {
  const ExpertIndex index = synthetic_index();
  std::uint32_t next = 0;
  for (const IndexedCluster& c : index.clusters) {
    EXPECT_EQ(c.begin, next);
    next += c.size;
    for (std::uint32_t r = c.begin; r < c.begin + c.size; ++r) EXPECT_EQ(index.cluster_of(r), c.id);
  }
  EXPECT_EQ(next, index.size());
  EXPECT_NO_THROW(index.validate());
}

TEST(BuildIndex, StatsHistogram) {
  const ExpertIndex index = synthetic_index();
  std::uint64_t total = 0;
  std::uint32_t clusters = 0;
  for (const auto& [size, count] : index.stats.size_histogram) {
    total += static_cast<std::uint64_t>(size) * count;
    clusters += count;
  }
  EXPECT_EQ(total, index.size());
  EXPECT_EQ(clusters, index.clusters.size());
  EXPECT_EQ(index.stats.dim, 64u);
}

TEST(BuildIndex, SameSeedSameBytes) {
  ProviderSpec provider;
  provider.dim = 64;
  const auto a = serialize_index(build_index(small_corpus(), ChunkParams{50, 0.1}, provider, ClusteringConfig{}));
  const auto b = serialize_index(build_index(small_corpus(), ChunkParams{50, 0.1}, provider, ClusteringConfig{}));
  EXPECT_EQ(a, b);
}

TEST(BuildIndex, SingleClusterWarning) {
  std::vector<Chunk> chunks;
  std::vector<EmbeddingVector> vecs;
  for (int i = 0; i < 12; ++i) {
    Chunk c;
    c.doc_id = "d" + std::to_string(i);
    c.chunk_id = make_chunk_id(c.doc_id, 0);
    c.text = "x";
    c.end_token = 1;
    chunks.push_back(c);
    vecs.push_back(docroute::testing::vec({1.0, 0.001 * i}));
  }
  ProviderSpec provider;
  provider.kind = ProviderKind::kPlanted;
  provider.dim = 2;
  BuildReport report;
  const auto index = build_index_from_embeddings(chunks, vecs, provider, ChunkParams{}, ClusteringConfig{}, &report);
  if (index.clusters.size() == 1) {
    EXPECT_EQ(report.warnings.size(), 1u);
  } else {
    EXPECT_TRUE(report.warnings.empty());
  }
}

TEST(IndexFile, RoundTrip) {
  const ExpertIndex index = synthetic_index();
  TempDir dir("index");
  save_index(index, dir / "x.idx");
  EXPECT_EQ(load_index(dir / "x.idx"), index);
  EXPECT_EQ(deserialize_index(serialize_index(index)), index);
}

TEST(IndexFile, RoundTripDeterministicProvider) {
  ProviderSpec provider;
  provider.dim = 48;
  provider.seed = 9;
  const ExpertIndex index = build_index(small_corpus(), ChunkParams{40, 0.2}, provider, ClusteringConfig{});
  EXPECT_EQ(deserialize_index(serialize_index(index)), index);
}

TEST(IndexFile, CorruptionIsDetected) {
  const std::string bytes = serialize_index(synthetic_index());
  EXPECT_EQ(load_error(bytes.substr(0, bytes.size() / 2)), ErrorKind::kChecksum);
  EXPECT_EQ(load_error(bytes.substr(0, bytes.size() - 1)), ErrorKind::kChecksum);

  std::string flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x40;
  EXPECT_EQ(load_error(flipped), ErrorKind::kChecksum);

  std::string magic = bytes;
  magic[0] = 'X';
  EXPECT_EQ(load_error(magic), ErrorKind::kBadMagic);
  EXPECT_EQ(load_error("DR"), ErrorKind::kBadMagic);
}

TEST(IndexFile, VersionGate) {
  std::string bytes = serialize_index(synthetic_index());
  bytes[4] = 99;
  bytes[5] = bytes[6] = bytes[7] = 0;
  EXPECT_EQ(load_error(bytes), ErrorKind::kVersionMismatch);
}

TEST(IndexFile, InvariantsCheckedOnLoad) {
  ExpertIndex index = synthetic_index();
  index.clusters[0].raw_centroid[0] += 0.01f;
  EXPECT_EQ(load_error(serialize_index(index)), ErrorKind::kInvariantViolation);

  index = synthetic_index();
  index.stats.mean_tightness += 0.1;
  EXPECT_EQ(load_error(serialize_index(index)), ErrorKind::kInvariantViolation);
}

TEST(IndexFile, MissingFile) {
  try {
    load_index("/nonexistent/x.idx");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNotFound);
  }
}
