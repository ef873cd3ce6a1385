#pragma once

#include <memory>
#include <optional>

#include "docroute/index.hpp"
#include "docroute/result.hpp"

namespace docroute {

struct RouterConfig {
  std::uint32_t m = 2;  // clusters to select
  std::uint32_t p = 5;  // chunks per selected cluster
  std::optional<std::uint32_t> context_token_budget;

  void validate() const;
};

/// Rejects a query-time provider that is not the ingestion model.
void check_provider_matches(const ProviderSpec& index_provider, const ProviderSpec& query_provider);

/// Centroid routing over an immutable index. Safe for concurrent queries.
class Router {
 public:
  /// `embedder` may be null when every query carries its own embedding.
  Router(const ExpertIndex& index, RouterConfig config, std::shared_ptr<const Embedder> embedder = nullptr);

  const RouterConfig& config() const { return config_; }

  /// Scores every centroid once; best min(m, M) clusters, ties to lower id.
  std::vector<ClusterScore> route(const EmbeddingVector& query, InstrumentationCounters& counters) const;

  /// Exact scan of one cluster's members; top p, ties to lower chunk id.
  std::vector<ScoredChunk> retrieve_within(const EmbeddingVector& query, std::uint32_t cluster_id, std::size_t p,
                                           InstrumentationCounters& counters) const;

  QueryResult answer(const Query& query) const;
  QueryResult answer(std::string_view text) const { return answer(Query{std::string(text), std::nullopt}); }

 private:
  const ExpertIndex& index_;
  RouterConfig config_;
  std::shared_ptr<const Embedder> embedder_;
};

/// Shared by both pipelines: validates the query and produces its embedding.
EmbeddingVector embed_query(const Query& query, const ExpertIndex& index, const Embedder* embedder);

}  // namespace docroute
