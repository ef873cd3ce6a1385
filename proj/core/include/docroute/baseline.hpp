#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <span>

#include "docroute/index.hpp"
#include "docroute/result.hpp"

namespace docroute {

enum class RerankerKind { kNone, kLexicalOverlap, kFixedCostMock };

std::string_view to_string(RerankerKind kind);
RerankerKind parse_reranker(std::string_view name);

struct BaselineConfig {
  std::uint32_t k = 10;
  RerankerKind reranker = RerankerKind::kLexicalOverlap;
  std::chrono::microseconds rerank_unit_cost{5000};  // fixed-cost-mock only
  std::optional<std::uint32_t> context_token_budget;

  void validate() const;
};

/// Exact cosine scan over all N chunks; top k, ties to lower chunk id.
std::vector<ScoredChunk> flat_retrieve(const EmbeddingVector& query, const ExpertIndex& index, std::size_t k,
                                       InstrumentationCounters& counters);

/// Multiset token-overlap F1 (ASCII case-folded).
double overlap_f1(std::span<const std::string> query_tokens, std::span<const std::string> text_tokens);

std::vector<ScoredChunk> rerank(std::string_view query, std::vector<ScoredChunk> candidates, const ExpertIndex& index,
                                const BaselineConfig& config);

/// Flat retrieval followed by a re-ranking stage.
class FlatBaseline {
 public:
  FlatBaseline(const ExpertIndex& index, BaselineConfig config, std::shared_ptr<const Embedder> embedder = nullptr);

  const BaselineConfig& config() const { return config_; }

  QueryResult answer(const Query& query) const;
  QueryResult answer(std::string_view text) const { return answer(Query{std::string(text), std::nullopt}); }

 private:
  const ExpertIndex& index_;
  BaselineConfig config_;
  std::shared_ptr<const Embedder> embedder_;
};

}  // namespace docroute
