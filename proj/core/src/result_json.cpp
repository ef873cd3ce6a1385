#include "docroute/errors.hpp"
#include "docroute/result.hpp"
#include "json.hpp"

namespace docroute {

namespace {

double to_ms(std::chrono::nanoseconds d) { return std::chrono::duration<double, std::milli>(d).count(); }

}  // namespace

std::string_view to_string(Pipeline pipeline) {
  return pipeline == Pipeline::kMode ? "mode" : "baseline";
}

Pipeline parse_pipeline(std::string_view name) {
  if (name == "mode") return Pipeline::kMode;
  if (name == "baseline") return Pipeline::kBaseline;
  fail(ErrorKind::kConfig, "unknown pipeline '" + std::string(name) + "' (expected mode or baseline)");
}

std::string to_json(const QueryResult& result, const JsonOptions& options) {
  using nlohmann::json;
  json out;
  out["pipeline"] = to_string(result.pipeline);
  out["query_text"] = result.query_text;
  if (options.include_vectors) out["query_embedding"] = result.query_embedding.values();

  out["selected_clusters"] = json::array();
  for (const ClusterScore& c : result.selected_clusters) {
    out["selected_clusters"].push_back({{"cluster_id", c.cluster_id}, {"score", c.score}});
  }
  out["chunks"] = json::array();
  for (const ScoredChunk& c : result.chunks) {
    out["chunks"].push_back({{"chunk_id", c.chunk_id}, {"score", c.score}, {"cluster_id", c.cluster_id}});
  }
  out["context"] = result.context;
  out["context_chunks"] = result.context_chunks;

  const InstrumentationCounters& k = result.counters;
  out["counters"] = {
      {"centroid_comparisons", k.centroid_comparisons},
      {"member_comparisons", k.member_comparisons},
      {"end_to_end_latency_ms", to_ms(k.end_to_end)},
      {"embed_latency_ms", to_ms(k.embed)},
      {"retrieval_latency_ms", to_ms(k.retrieval)},
      {"rerank_latency_ms", to_ms(k.rerank)},
  };
  return out.dump(options.indent);
}

}  // namespace docroute
