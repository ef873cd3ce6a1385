#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "docroute/baseline.hpp"
#include "docroute/index.hpp"
#include "docroute/router.hpp"

namespace docroute {

// ---------------------------------------------------------------------------
// Synthetic corpora with planted embeddings

struct SyntheticSpec {
  std::uint32_t topics = 10;
  std::uint32_t chunks_per_topic = 50;
  std::uint32_t dim = 64;
  double noise_sigma = 0.05;
  std::uint64_t seed = 0;
};

/// small / medium / large: 100 / 200 / 500 chunks over 10 topics, d = 64.
SyntheticSpec synthetic_preset(std::string_view name);

struct SyntheticCorpus {
  std::vector<Chunk> chunks;
  std::vector<EmbeddingVector> embeddings;
  std::vector<std::uint32_t> labels;  // planted topic per chunk
  ProviderSpec provider;              // kind = planted
};

/// Topic centers are the first `topics` axis unit vectors; each chunk is
/// normalize(center + N(0, sigma^2 I)).
SyntheticCorpus synth_corpus(const SyntheticSpec& spec);

/// Clusters a synthetic corpus with the planted vectors.
ExpertIndex build_synthetic_index(const SyntheticCorpus& corpus, const ClusteringConfig& clustering,
                                  BuildReport* report = nullptr);

// ---------------------------------------------------------------------------
// Evaluation sets

struct EvalItem {
  Query query;
  std::vector<std::string> gold;  // chunk ids that count as a hit
};

struct EvalSet {
  std::vector<EvalItem> items;
};

/// `count` queries, each normalize(chunk + N(0, sigma^2 I)) for a random
/// chunk; the source chunk is the gold id.
EvalSet make_synthetic_evalset(const SyntheticCorpus& corpus, std::size_t count, double noise_sigma,
                               std::uint64_t seed);

/// JSONL: {"query": "...", "gold": ["doc#0", ...]} per line.
EvalSet load_evalset(const std::filesystem::path& path);
EvalSet parse_evalset(std::string_view content, std::string_view source = "<memory>");

/// Every item needs a non-empty gold set that resolves in the index.
void validate_evalset(const EvalSet& evalset, const ExpertIndex& index);

// ---------------------------------------------------------------------------
// Running pipelines

class PipelineRunner {
 public:
  PipelineRunner(const ExpertIndex& index, const RouterConfig& router, const BaselineConfig& baseline,
                 std::shared_ptr<const Embedder> embedder = nullptr);

  QueryResult run(Pipeline pipeline, const Query& query) const;
  /// Retrieval depth scored by hit_rate: m*p for the router, k for the baseline.
  std::size_t default_depth(Pipeline pipeline) const;
  const ExpertIndex& index() const { return index_; }

 private:
  const ExpertIndex& index_;
  Router router_;
  FlatBaseline baseline_;
};

bool is_hit(const QueryResult& result, const std::vector<std::string>& gold, std::size_t depth);

double hit_rate(const PipelineRunner& runner, Pipeline pipeline, const EvalSet& evalset, std::size_t depth);

// ---------------------------------------------------------------------------
// Latency measurement and reports

struct LatencyStats {
  double mean_ms = 0.0;
  double p50_ms = 0.0;
  double p95_ms = 0.0;
};

/// Linear interpolation between closest ranks.
double percentile(std::vector<double> values, double q);
LatencyStats latency_stats(const std::vector<double>& values_ms);

struct QueryLogEntry {
  std::uint32_t run = 0;
  Pipeline pipeline = Pipeline::kMode;
  std::size_t query_index = 0;
  double end_to_end_ms = 0.0;
  double embed_ms = 0.0;
  double retrieval_ms = 0.0;
  double rerank_ms = 0.0;
  std::uint64_t centroid_comparisons = 0;
  std::uint64_t member_comparisons = 0;
  std::optional<bool> hit;
};

struct PipelineReport {
  Pipeline pipeline = Pipeline::kMode;
  LatencyStats end_to_end;  // includes embedding
  LatencyStats retrieval;   // excludes embedding
  LatencyStats embed;
  double mean_centroid_comparisons = 0.0;
  double mean_member_comparisons = 0.0;
  std::optional<double> hit_rate;
  std::size_t hit_depth = 0;
  std::size_t queries_per_run = 0;
};

struct BenchReport {
  std::string corpus_label;
  std::uint64_t chunks = 0;    // N
  std::uint32_t clusters = 0;  // M of the first run
  std::uint32_t dim = 0;       // d
  double mean_tightness = 0.0;
  std::uint32_t runs = 1;
  std::vector<std::uint32_t> clusters_per_run;
  std::vector<PipelineReport> pipelines;
  bool contended = false;  // queries were replayed in parallel
  std::vector<QueryLogEntry> log;

  const PipelineReport* find(Pipeline pipeline) const;
};

/// Per-pipeline statistics: computed per run from the log, then averaged
/// over runs. Hit depth is not in the log and is passed through.
std::vector<PipelineReport> aggregate_log(const std::vector<QueryLogEntry>& log, std::uint32_t runs,
                                          const std::vector<std::pair<Pipeline, std::size_t>>& depths);

struct MeasureOptions {
  std::vector<Pipeline> pipelines{Pipeline::kMode, Pipeline::kBaseline};
  std::uint32_t warmup = 5;
  bool parallel = false;
};

/// Times every query once per pipeline after `warmup` unrecorded queries.
/// Queries run in the given order; log entries carry `run`.
std::vector<QueryLogEntry> measure_latency(const PipelineRunner& runner, const std::vector<EvalItem>& queries,
                                           const MeasureOptions& options, std::uint32_t run = 0,
                                           bool score_hits = false);

struct BenchOptions {
  RouterConfig router;
  BaselineConfig baseline;
  ClusteringConfig clustering;  // synthetic runs only
  MeasureOptions measure;
  std::uint32_t runs = 3;
  std::uint64_t seed = 0;
  std::size_t synthetic_queries = 100;
  double query_noise = 0.05;
};

/// Benchmarks an existing index. Each run replays the evalset in an order
/// shuffled with seed + run.
BenchReport run_bench(const ExpertIndex& index, const EvalSet& evalset, const BenchOptions& options,
                      std::shared_ptr<const Embedder> embedder, std::string corpus_label);

/// Each run draws a fresh corpus and evalset with seed + run and rebuilds.
BenchReport run_synthetic_bench(const SyntheticSpec& spec, const BenchOptions& options, std::string corpus_label);

std::string report_to_json(const BenchReport& report, int indent = 2);
std::string report_to_table(const BenchReport& report);
std::string log_to_jsonl(const std::vector<QueryLogEntry>& log);
std::vector<QueryLogEntry> parse_log_jsonl(std::string_view content);

// ---------------------------------------------------------------------------
// Tuning

struct TuneRow {
  std::uint32_t min_cluster_size = 0;
  bool ok = false;
  std::string error;
  double hit_rate = 0.0;
  std::uint32_t clusters = 0;          // final M
  std::size_t density_clusters = 0;    // before refinement
  bool fallback = false;
  double mean_tightness = 0.0;
};

struct TuneResult {
  std::uint32_t chosen = 0;
  std::vector<TuneRow> rows;
  std::vector<std::string> warnings;
};

/// Rebuilds the index for every grid value and keeps the best router hit
/// rate (ties: smaller value). max_cluster_size is raised to value + 1 when
/// a grid value would reach it. Failed builds are skipped with a warning.
TuneResult tune_min_cluster_size(const std::vector<Chunk>& chunks, std::span<const EmbeddingVector> embeddings,
                                 const ProviderSpec& provider, const ChunkParams& chunking,
                                 const ClusteringConfig& base, const EvalSet& evalset,
                                 const std::vector<std::uint32_t>& grid, const RouterConfig& router,
                                 std::shared_ptr<const Embedder> embedder = nullptr);

std::string tune_to_json(const TuneResult& result, int indent = 2);
std::string tune_to_table(const TuneResult& result);

}  // namespace docroute
