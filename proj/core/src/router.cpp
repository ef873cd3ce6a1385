#include "docroute/router.hpp"

#include <algorithm>

#include "docroute/corpus.hpp"
#include "docroute/errors.hpp"

namespace docroute {

namespace {

using Clock = std::chrono::steady_clock;

bool blank(std::string_view s) { return s.find_first_not_of(" \t\r\n\f\v") == std::string_view::npos; }

}  // namespace

bool ranks_before(const ScoredChunk& a, const ScoredChunk& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.chunk_id < b.chunk_id;
}

std::string assemble_context(const ExpertIndex& index, const std::vector<ScoredChunk>& ranked,
                             std::optional<std::uint32_t> token_budget, std::size_t* included) {
  std::string context;
  std::size_t used_tokens = 0;
  std::size_t count = 0;
  for (const ScoredChunk& sc : ranked) {
    const Chunk& chunk = index.chunks[sc.row];
    if (token_budget) {
      if (used_tokens + chunk.token_count() > *token_budget) break;
      used_tokens += chunk.token_count();
    }
    if (count > 0) context += "\n\n";
    context += '[';
    context += chunk.doc_id;
    context += '#';
    context += std::to_string(chunk.ordinal);
    context += "]\n";
    context += chunk.text;
    ++count;
  }
  if (included != nullptr) *included = count;
  return context;
}

void RouterConfig::validate() const {
  if (m < 1) fail(ErrorKind::kConfig, "m must be >= 1");
  if (p < 1) fail(ErrorKind::kConfig, "p must be >= 1");
}

void check_provider_matches(const ProviderSpec& index_provider, const ProviderSpec& query_provider) {
  if (!index_provider.same_model(query_provider)) {
    fail(ErrorKind::kConfig,
         "query embedding provider (" + std::string(to_string(query_provider.kind)) + ", dim " +
             std::to_string(query_provider.dim) + ", seed " + std::to_string(query_provider.seed) +
             ") does not match the ingestion provider (" + std::string(to_string(index_provider.kind)) + ", dim " +
             std::to_string(index_provider.dim) + ", seed " + std::to_string(index_provider.seed) + ")");
  }
}

EmbeddingVector embed_query(const Query& query, const ExpertIndex& index, const Embedder* embedder) {
  if (blank(query.text)) fail(ErrorKind::kInvalidArgument, "query text is empty");
  if (query.embedding) {
    if (query.embedding->dim() != index.dim()) {
      fail(ErrorKind::kDimensionMismatch, "query embedding dim " + std::to_string(query.embedding->dim()) +
                                              " != index dim " + std::to_string(index.dim()));
    }
    return *query.embedding;
  }
  if (embedder == nullptr) {
    if (index.provider.kind == ProviderKind::kPlanted) {
      fail(ErrorKind::kConfig, "index was built from planted vectors; queries must carry an embedding");
    }
    fail(ErrorKind::kConfig, "no embedding provider configured for text queries");
  }
  return embedder->embed(query.text);
}

Router::Router(const ExpertIndex& index, RouterConfig config, std::shared_ptr<const Embedder> embedder)
    : index_(index), config_(config), embedder_(std::move(embedder)) {
  config_.validate();
  if (embedder_) check_provider_matches(index_.provider, embedder_->spec());
}

std::vector<ClusterScore> Router::route(const EmbeddingVector& query, InstrumentationCounters& counters) const {
  std::vector<ClusterScore> scores;
  scores.reserve(index_.clusters.size());
  for (const IndexedCluster& c : index_.clusters) {
    scores.push_back({c.id, cosine_similarity(query, c.centroid)});
  }
  counters.centroid_comparisons += index_.clusters.size();
  const std::size_t keep = std::min<std::size_t>(config_.m, scores.size());
  std::partial_sort(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(keep), scores.end(),
                    [](const ClusterScore& a, const ClusterScore& b) {
                      if (a.score != b.score) return a.score > b.score;
                      return a.cluster_id < b.cluster_id;
                    });
  scores.resize(keep);
  return scores;
}

std::vector<ScoredChunk> Router::retrieve_within(const EmbeddingVector& query, std::uint32_t cluster_id,
                                                 std::size_t p, InstrumentationCounters& counters) const {
  if (cluster_id >= index_.clusters.size()) {
    fail(ErrorKind::kInvalidArgument, "cluster " + std::to_string(cluster_id) + " is not in the index");
  }
  const IndexedCluster& cluster = index_.clusters[cluster_id];
  std::vector<ScoredChunk> scored;
  scored.reserve(cluster.size);
  for (std::uint32_t r = cluster.begin; r < cluster.begin + cluster.size; ++r) {
    scored.push_back({index_.chunks[r].chunk_id, cosine_similarity(query.values(), index_.vector(r)), cluster.id, r});
  }
  counters.member_comparisons += cluster.size;
  const std::size_t keep = std::min(p, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(), ranks_before);
  scored.resize(keep);
  return scored;
}

QueryResult Router::answer(const Query& query) const {
  const auto start = Clock::now();
  QueryResult result;
  result.pipeline = Pipeline::kMode;
  result.query_text = query.text;
  result.query_embedding = embed_query(query, index_, embedder_.get());
  const auto embedded = Clock::now();

  InstrumentationCounters& counters = result.counters;
  result.selected_clusters = route(result.query_embedding, counters);
  for (const ClusterScore& selected : result.selected_clusters) {
    std::vector<ScoredChunk> part = retrieve_within(result.query_embedding, selected.cluster_id, config_.p, counters);
    std::move(part.begin(), part.end(), std::back_inserter(result.chunks));
  }
  std::sort(result.chunks.begin(), result.chunks.end(), ranks_before);
  result.context = assemble_context(index_, result.chunks, config_.context_token_budget, &result.context_chunks);

  const auto done = Clock::now();
  counters.embed = embedded - start;
  counters.retrieval = done - embedded;
  counters.end_to_end = done - start;
  return result;
}

}  // namespace docroute
