#include "docroute/baseline.hpp"

#include <algorithm>
#include <map>
#include <thread>

#include "docroute/corpus.hpp"
#include "docroute/errors.hpp"
#include "docroute/router.hpp"

namespace docroute {

namespace {

using Clock = std::chrono::steady_clock;

std::string fold(std::string s) {
  for (char& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

}  // namespace

std::string_view to_string(RerankerKind kind) {
  switch (kind) {
    case RerankerKind::kNone: return "none";
    case RerankerKind::kLexicalOverlap: return "lexical-overlap";
    case RerankerKind::kFixedCostMock: return "fixed-cost-mock";
  }
  return "unknown";
}

RerankerKind parse_reranker(std::string_view name) {
  if (name == "none") return RerankerKind::kNone;
  if (name == "lexical-overlap") return RerankerKind::kLexicalOverlap;
  if (name == "fixed-cost-mock") return RerankerKind::kFixedCostMock;
  fail(ErrorKind::kConfig, "unknown reranker '" + std::string(name) + "'");
}

void BaselineConfig::validate() const {
  if (k < 1) fail(ErrorKind::kConfig, "k must be >= 1");
  if (rerank_unit_cost.count() < 0) fail(ErrorKind::kConfig, "rerank unit cost must be >= 0");
}

std::vector<ScoredChunk> flat_retrieve(const EmbeddingVector& query, const ExpertIndex& index, std::size_t k,
                                       InstrumentationCounters& counters) {
  if (query.dim() != index.dim()) fail(ErrorKind::kDimensionMismatch, "query dim does not match index dim");
  std::vector<ScoredChunk> scored;
  scored.reserve(index.size());
  for (const IndexedCluster& cluster : index.clusters) {
    for (std::uint32_t r = cluster.begin; r < cluster.begin + cluster.size; ++r) {
      scored.push_back({index.chunks[r].chunk_id, cosine_similarity(query.values(), index.vector(r)), cluster.id, r});
    }
  }
  counters.member_comparisons += index.size();
  const std::size_t keep = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(), ranks_before);
  scored.resize(keep);
  return scored;
}

double overlap_f1(std::span<const std::string> query_tokens, std::span<const std::string> text_tokens) {
  if (query_tokens.empty() || text_tokens.empty()) return 0.0;
  std::map<std::string, long> counts;
  for (const std::string& t : query_tokens) ++counts[fold(t)];
  long common = 0;
  for (const std::string& t : text_tokens) {
    auto it = counts.find(fold(t));
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  if (common == 0) return 0.0;
  const double precision = static_cast<double>(common) / static_cast<double>(text_tokens.size());
  const double recall = static_cast<double>(common) / static_cast<double>(query_tokens.size());
  return 2.0 * precision * recall / (precision + recall);
}

std::vector<ScoredChunk> rerank(std::string_view query, std::vector<ScoredChunk> candidates, const ExpertIndex& index,
                                const BaselineConfig& config) {
  if (candidates.empty()) fail(ErrorKind::kInvalidArgument, "rerank needs at least one candidate");
  switch (config.reranker) {
    case RerankerKind::kNone:
      break;
    case RerankerKind::kLexicalOverlap: {
      const std::vector<std::string> q = tokenize(query);
      for (ScoredChunk& c : candidates) c.score = overlap_f1(q, tokenize(index.chunks[c.row].text));
      std::stable_sort(candidates.begin(), candidates.end(),
                       [](const ScoredChunk& a, const ScoredChunk& b) { return a.score > b.score; });
      break;
    }
    case RerankerKind::kFixedCostMock:
      // One simulated forward pass per candidate.
      for (std::size_t i = 0; i < candidates.size(); ++i) std::this_thread::sleep_for(config.rerank_unit_cost);
      break;
  }
  return candidates;
}

FlatBaseline::FlatBaseline(const ExpertIndex& index, BaselineConfig config, std::shared_ptr<const Embedder> embedder)
    : index_(index), config_(config), embedder_(std::move(embedder)) {
  config_.validate();
  if (embedder_) check_provider_matches(index_.provider, embedder_->spec());
}

QueryResult FlatBaseline::answer(const Query& query) const {
  const auto start = Clock::now();
  QueryResult result;
  result.pipeline = Pipeline::kBaseline;
  result.query_text = query.text;
  result.query_embedding = embed_query(query, index_, embedder_.get());
  const auto embedded = Clock::now();

  std::vector<ScoredChunk> candidates = flat_retrieve(result.query_embedding, index_, config_.k, result.counters);
  const auto rerank_start = Clock::now();
  result.chunks = rerank(query.text, std::move(candidates), index_, config_);
  const auto rerank_done = Clock::now();
  result.context = assemble_context(index_, result.chunks, config_.context_token_budget, &result.context_chunks);

  const auto done = Clock::now();
  result.counters.embed = embedded - start;
  result.counters.rerank = rerank_done - rerank_start;
  result.counters.retrieval = done - embedded;
  result.counters.end_to_end = done - start;
  return result;
}

}  // namespace docroute
