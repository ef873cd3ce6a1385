#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "docroute/embedding.hpp"

namespace docroute {

struct ExpertIndex;

enum class Pipeline { kMode, kBaseline };

std::string_view to_string(Pipeline pipeline);
Pipeline parse_pipeline(std::string_view name);

/// Query text, optionally with a precomputed embedding. Indexes built from
/// planted vectors can only be queried with the embedding present.
struct Query {
  std::string text;
  std::optional<EmbeddingVector> embedding;
};

struct ClusterScore {
  std::uint32_t cluster_id = 0;
  double score = 0.0;

  friend bool operator==(const ClusterScore&, const ClusterScore&) = default;
};

struct ScoredChunk {
  std::string chunk_id;
  double score = 0.0;
  std::uint32_t cluster_id = 0;
  std::size_t row = 0;  // chunk-store row in the index

  friend bool operator==(const ScoredChunk&, const ScoredChunk&) = default;
};

/// Same fields for both pipelines so runs can be compared directly.
struct InstrumentationCounters {
  std::uint64_t centroid_comparisons = 0;
  std::uint64_t member_comparisons = 0;
  std::chrono::nanoseconds end_to_end{0};
  std::chrono::nanoseconds embed{0};
  std::chrono::nanoseconds retrieval{0};  // end_to_end minus embed
  std::chrono::nanoseconds rerank{0};     // part of retrieval; baseline only
};

struct QueryResult {
  Pipeline pipeline = Pipeline::kMode;
  std::string query_text;
  EmbeddingVector query_embedding;
  std::vector<ClusterScore> selected_clusters;  // empty for the baseline
  std::vector<ScoredChunk> chunks;              // ranked
  std::string context;
  std::size_t context_chunks = 0;  // how many ranked chunks made it into context
  InstrumentationCounters counters;
};

using RoutedResult = QueryResult;

/// Joins chunk texts in rank order, each under a `[doc_id#ordinal]` header,
/// separated by blank lines. With a budget, stops before the first chunk
/// whose tokens would exceed it.
std::string assemble_context(const ExpertIndex& index, const std::vector<ScoredChunk>& ranked,
                             std::optional<std::uint32_t> token_budget, std::size_t* included = nullptr);

/// Orders by score descending, then chunk id ascending.
bool ranks_before(const ScoredChunk& a, const ScoredChunk& b);

struct JsonOptions {
  bool include_vectors = false;
  int indent = -1;
};

std::string to_json(const QueryResult& result, const JsonOptions& options = {});

}  // namespace docroute
