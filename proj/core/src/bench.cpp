#include "docroute/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "docroute/errors.hpp"
#include "json.hpp"

namespace docroute {

namespace {

using nlohmann::json;

double to_ms(std::chrono::nanoseconds d) { return std::chrono::duration<double, std::milli>(d).count(); }

std::string two_digits(std::uint32_t v, int width) {
  std::ostringstream s;
  s << std::setw(width) << std::setfill('0') << v;
  return s.str();
}

json latency_json(const LatencyStats& s) { return {{"mean", s.mean_ms}, {"p50", s.p50_ms}, {"p95", s.p95_ms}}; }

}  // namespace

// ---------------------------------------------------------------------------

SyntheticSpec synthetic_preset(std::string_view name) {
  SyntheticSpec spec;
  if (name == "small") {
    spec.chunks_per_topic = 10;
  } else if (name == "medium") {
    spec.chunks_per_topic = 20;
  } else if (name == "large") {
    spec.chunks_per_topic = 50;
  } else {
    fail(ErrorKind::kConfig, "unknown synthetic preset '" + std::string(name) + "' (expected small, medium or large)");
  }
  return spec;
}

SyntheticCorpus synth_corpus(const SyntheticSpec& spec) {
  if (spec.topics < 1) fail(ErrorKind::kInvalidArgument, "topics must be >= 1");
  if (spec.chunks_per_topic < 1) fail(ErrorKind::kInvalidArgument, "chunks_per_topic must be >= 1");
  if (spec.dim < spec.topics) {
    fail(ErrorKind::kInvalidArgument, "dim (" + std::to_string(spec.dim) + ") must be >= topics (" +
                                          std::to_string(spec.topics) + ")");
  }
  if (!(spec.noise_sigma >= 0.0)) fail(ErrorKind::kInvalidArgument, "noise_sigma must be >= 0");

  SyntheticCorpus corpus;
  corpus.provider.kind = ProviderKind::kPlanted;
  corpus.provider.dim = spec.dim;
  corpus.provider.model_name = "synthetic";

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, spec.noise_sigma > 0.0 ? spec.noise_sigma : 1.0);
  std::vector<double> raw(spec.dim);
  for (std::uint32_t t = 0; t < spec.topics; ++t) {
    for (std::uint32_t i = 0; i < spec.chunks_per_topic; ++i) {
      std::fill(raw.begin(), raw.end(), 0.0);
      raw[t] = 1.0;
      if (spec.noise_sigma > 0.0) {
        for (double& x : raw) x += noise(rng);
      }
      Chunk chunk;
      chunk.doc_id = "t" + two_digits(t, 2) + "-c" + two_digits(i, 3);
      chunk.ordinal = 0;
      chunk.chunk_id = make_chunk_id(chunk.doc_id, 0);
      chunk.text = "synthetic topic " + std::to_string(t) + " item " + std::to_string(i);
      chunk.start_token = 0;
      chunk.end_token = static_cast<std::uint32_t>(tokenize(chunk.text).size());
      corpus.chunks.push_back(std::move(chunk));
      corpus.embeddings.push_back(EmbeddingVector::normalized(std::span<const double>(raw)));
      corpus.labels.push_back(t);
    }
  }
  return corpus;
}

ExpertIndex build_synthetic_index(const SyntheticCorpus& corpus, const ClusteringConfig& clustering,
                                  BuildReport* report) {
  ChunkParams chunking;
  return build_index_from_embeddings(corpus.chunks, corpus.embeddings, corpus.provider, chunking, clustering, report);
}

EvalSet make_synthetic_evalset(const SyntheticCorpus& corpus, std::size_t count, double noise_sigma,
                               std::uint64_t seed) {
  if (corpus.chunks.empty()) fail(ErrorKind::kInvalidArgument, "synthetic corpus is empty");
  std::mt19937_64 rng(seed ^ 0x5EED0F0E7A15E7ULL);
  std::normal_distribution<double> noise(0.0, noise_sigma > 0.0 ? noise_sigma : 1.0);
  EvalSet set;
  const std::size_t dim = corpus.provider.dim;
  std::vector<double> raw(dim);
  for (std::size_t q = 0; q < count; ++q) {
    const std::size_t source = static_cast<std::size_t>(rng() % corpus.chunks.size());
    const auto v = corpus.embeddings[source].values();
    for (std::size_t j = 0; j < dim; ++j) raw[j] = static_cast<double>(v[j]) + (noise_sigma > 0.0 ? noise(rng) : 0.0);
    EvalItem item;
    item.query.text = "q" + std::to_string(q);
    item.query.embedding = EmbeddingVector::normalized(std::span<const double>(raw));
    item.gold = {corpus.chunks[source].chunk_id};
    set.items.push_back(std::move(item));
  }
  return set;
}

EvalSet parse_evalset(std::string_view content, std::string_view source) {
  EvalSet set;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t eol = content.find('\n', pos);
    if (eol == std::string_view::npos) eol = content.size();
    const std::string_view line = content.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) fail(ErrorKind::kEvalSet, where + ": malformed evalset item");
    if (!obj.contains("query") || !obj["query"].is_string()) {
      fail(ErrorKind::kEvalSet, where + ": evalset item lacks a string 'query'");
    }
    if (!obj.contains("gold") || !obj["gold"].is_array()) {
      fail(ErrorKind::kEvalSet, where + ": evalset item lacks a 'gold' array");
    }
    EvalItem item;
    item.query.text = obj["query"].get<std::string>();
    for (const json& g : obj["gold"]) {
      if (!g.is_string()) fail(ErrorKind::kEvalSet, where + ": gold ids must be strings");
      item.gold.push_back(g.get<std::string>());
    }
    set.items.push_back(std::move(item));
  }
  return set;
}

EvalSet load_evalset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kNotFound, "evalset not found: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_evalset(buf.str(), path.string());
}

void validate_evalset(const EvalSet& evalset, const ExpertIndex& index) {
  if (evalset.items.empty()) fail(ErrorKind::kEvalSet, "evalset is empty");
  const auto rows = chunk_rows(index);
  for (std::size_t i = 0; i < evalset.items.size(); ++i) {
    const EvalItem& item = evalset.items[i];
    const std::string label = "evalset item " + std::to_string(i) + " ('" + item.query.text + "')";
    if (item.gold.empty()) fail(ErrorKind::kEvalSet, label + " has no gold chunk ids");
    for (const std::string& g : item.gold) {
      if (!rows.contains(g)) fail(ErrorKind::kEvalSet, label + ": gold id '" + g + "' is not in the index");
    }
  }
}

// ---------------------------------------------------------------------------

PipelineRunner::PipelineRunner(const ExpertIndex& index, const RouterConfig& router, const BaselineConfig& baseline,
                               std::shared_ptr<const Embedder> embedder)
    : index_(index), router_(index, router, embedder), baseline_(index, baseline, embedder) {}

QueryResult PipelineRunner::run(Pipeline pipeline, const Query& query) const {
  return pipeline == Pipeline::kMode ? router_.answer(query) : baseline_.answer(query);
}

std::size_t PipelineRunner::default_depth(Pipeline pipeline) const {
  if (pipeline == Pipeline::kMode) {
    return static_cast<std::size_t>(router_.config().m) * router_.config().p;
  }
  return baseline_.config().k;
}

bool is_hit(const QueryResult& result, const std::vector<std::string>& gold, std::size_t depth) {
  const std::size_t limit = std::min(depth, result.chunks.size());
  for (std::size_t i = 0; i < limit; ++i) {
    if (std::find(gold.begin(), gold.end(), result.chunks[i].chunk_id) != gold.end()) return true;
  }
  return false;
}

double hit_rate(const PipelineRunner& runner, Pipeline pipeline, const EvalSet& evalset, std::size_t depth) {
  validate_evalset(evalset, runner.index());
  std::size_t hits = 0;
  for (const EvalItem& item : evalset.items) {
    if (is_hit(runner.run(pipeline, item.query), item.gold, depth)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(evalset.items.size());
}

// ---------------------------------------------------------------------------

double percentile(std::vector<double> values, double q) {
  if (values.empty()) fail(ErrorKind::kInvalidArgument, "percentile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  return values[lo] + (values[hi] - values[lo]) * (pos - static_cast<double>(lo));
}

LatencyStats latency_stats(const std::vector<double>& values_ms) {
  if (values_ms.empty()) fail(ErrorKind::kInvalidArgument, "no latencies recorded");
  LatencyStats s;
  s.mean_ms = std::accumulate(values_ms.begin(), values_ms.end(), 0.0) / static_cast<double>(values_ms.size());
  s.p50_ms = percentile(values_ms, 0.50);
  s.p95_ms = percentile(values_ms, 0.95);
  return s;
}

const PipelineReport* BenchReport::find(Pipeline pipeline) const {
  for (const PipelineReport& p : pipelines) {
    if (p.pipeline == pipeline) return &p;
  }
  return nullptr;
}

std::vector<PipelineReport> aggregate_log(const std::vector<QueryLogEntry>& log, std::uint32_t runs,
                                          const std::vector<std::pair<Pipeline, std::size_t>>& depths) {
  std::vector<PipelineReport> out;
  for (const auto& [pipeline, depth] : depths) {
    PipelineReport report;
    report.pipeline = pipeline;
    report.hit_depth = depth;
    std::size_t used_runs = 0;
    std::size_t hit_runs = 0;
    double hit_sum = 0.0;
    auto add = [](LatencyStats& acc, const LatencyStats& s) {
      acc.mean_ms += s.mean_ms;
      acc.p50_ms += s.p50_ms;
      acc.p95_ms += s.p95_ms;
    };
    for (std::uint32_t run = 0; run < runs; ++run) {
      std::vector<double> e2e, retrieval, embed;
      double centroid = 0.0, member = 0.0;
      std::size_t hits = 0, scored = 0;
      for (const QueryLogEntry& e : log) {
        if (e.run != run || e.pipeline != pipeline) continue;
        e2e.push_back(e.end_to_end_ms);
        retrieval.push_back(e.retrieval_ms);
        embed.push_back(e.embed_ms);
        centroid += static_cast<double>(e.centroid_comparisons);
        member += static_cast<double>(e.member_comparisons);
        if (e.hit) {
          ++scored;
          if (*e.hit) ++hits;
        }
      }
      if (e2e.empty()) continue;
      if (used_runs == 0) report.queries_per_run = e2e.size();
      ++used_runs;
      add(report.end_to_end, latency_stats(e2e));
      add(report.retrieval, latency_stats(retrieval));
      add(report.embed, latency_stats(embed));
      report.mean_centroid_comparisons += centroid / static_cast<double>(e2e.size());
      report.mean_member_comparisons += member / static_cast<double>(e2e.size());
      if (scored > 0) {
        ++hit_runs;
        hit_sum += static_cast<double>(hits) / static_cast<double>(scored);
      }
    }
    if (used_runs == 0) continue;
    const double div = static_cast<double>(used_runs);
    for (LatencyStats* s : {&report.end_to_end, &report.retrieval, &report.embed}) {
      s->mean_ms /= div;
      s->p50_ms /= div;
      s->p95_ms /= div;
    }
    report.mean_centroid_comparisons /= div;
    report.mean_member_comparisons /= div;
    if (hit_runs > 0) report.hit_rate = hit_sum / static_cast<double>(hit_runs);
    out.push_back(report);
  }
  return out;
}

std::vector<QueryLogEntry> measure_latency(const PipelineRunner& runner, const std::vector<EvalItem>& queries,
                                           const MeasureOptions& options, std::uint32_t run, bool score_hits) {
  if (queries.empty()) fail(ErrorKind::kInvalidArgument, "measure_latency needs at least one query");
  std::vector<QueryLogEntry> log;
  for (Pipeline pipeline : options.pipelines) {
    for (std::uint32_t w = 0; w < options.warmup; ++w) (void)runner.run(pipeline, queries[w % queries.size()].query);

    const std::size_t depth = runner.default_depth(pipeline);
    std::vector<QueryLogEntry> entries(queries.size());
    auto replay = [&](std::size_t i) {
      const QueryResult result = runner.run(pipeline, queries[i].query);
      QueryLogEntry& e = entries[i];
      e.run = run;
      e.pipeline = pipeline;
      e.query_index = i;
      e.end_to_end_ms = to_ms(result.counters.end_to_end);
      e.embed_ms = to_ms(result.counters.embed);
      e.retrieval_ms = to_ms(result.counters.retrieval);
      e.rerank_ms = to_ms(result.counters.rerank);
      e.centroid_comparisons = result.counters.centroid_comparisons;
      e.member_comparisons = result.counters.member_comparisons;
      if (score_hits) e.hit = is_hit(result, queries[i].gold, depth);
    };

    if (options.parallel) {
      const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          for (std::size_t i = w; i < queries.size(); i += workers) replay(i);
        });
      }
      for (std::thread& t : pool) t.join();
    } else {
      for (std::size_t i = 0; i < queries.size(); ++i) replay(i);
    }
    std::move(entries.begin(), entries.end(), std::back_inserter(log));
  }
  return log;
}

namespace {

std::vector<std::pair<Pipeline, std::size_t>> depths_for(const PipelineRunner& runner, const MeasureOptions& m) {
  std::vector<std::pair<Pipeline, std::size_t>> depths;
  for (Pipeline p : m.pipelines) depths.emplace_back(p, runner.default_depth(p));
  return depths;
}

}  // namespace

BenchReport run_bench(const ExpertIndex& index, const EvalSet& evalset, const BenchOptions& options,
                      std::shared_ptr<const Embedder> embedder, std::string corpus_label) {
  if (options.runs < 1) fail(ErrorKind::kConfig, "runs must be >= 1");
  validate_evalset(evalset, index);
  const PipelineRunner runner(index, options.router, options.baseline, std::move(embedder));

  BenchReport report;
  report.corpus_label = std::move(corpus_label);
  report.chunks = index.size();
  report.clusters = static_cast<std::uint32_t>(index.clusters.size());
  report.dim = index.dim();
  report.mean_tightness = index.stats.mean_tightness;
  report.runs = options.runs;
  report.contended = options.measure.parallel;
  for (std::uint32_t run = 0; run < options.runs; ++run) {
    std::vector<EvalItem> order = evalset.items;
    std::mt19937_64 rng(options.seed + run);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<QueryLogEntry> log = measure_latency(runner, order, options.measure, run, /*score_hits=*/true);
    std::move(log.begin(), log.end(), std::back_inserter(report.log));
    report.clusters_per_run.push_back(report.clusters);
  }
  report.pipelines = aggregate_log(report.log, report.runs, depths_for(runner, options.measure));
  return report;
}

BenchReport run_synthetic_bench(const SyntheticSpec& spec, const BenchOptions& options, std::string corpus_label) {
  if (options.runs < 1) fail(ErrorKind::kConfig, "runs must be >= 1");
  BenchReport report;
  report.corpus_label = std::move(corpus_label);
  report.runs = options.runs;
  report.contended = options.measure.parallel;
  std::vector<std::pair<Pipeline, std::size_t>> depths;
  double tightness = 0.0;
  for (std::uint32_t run = 0; run < options.runs; ++run) {
    SyntheticSpec run_spec = spec;
    run_spec.seed = options.seed + run;
    ClusteringConfig clustering = options.clustering;
    clustering.seed = options.clustering.seed + run;
    const SyntheticCorpus corpus = synth_corpus(run_spec);
    const ExpertIndex index = build_synthetic_index(corpus, clustering);
    const EvalSet evalset = make_synthetic_evalset(corpus, options.synthetic_queries, options.query_noise, run_spec.seed);
    const PipelineRunner runner(index, options.router, options.baseline);
    if (run == 0) {
      report.chunks = index.size();
      report.clusters = static_cast<std::uint32_t>(index.clusters.size());
      report.dim = index.dim();
      depths = depths_for(runner, options.measure);
    }
    report.clusters_per_run.push_back(static_cast<std::uint32_t>(index.clusters.size()));
    tightness += index.stats.mean_tightness;
    std::vector<QueryLogEntry> log = measure_latency(runner, evalset.items, options.measure, run, true);
    std::move(log.begin(), log.end(), std::back_inserter(report.log));
  }
  report.mean_tightness = tightness / static_cast<double>(options.runs);
  report.pipelines = aggregate_log(report.log, report.runs, depths);
  return report;
}

std::string report_to_json(const BenchReport& report, int indent) {
  json out;
  out["corpus_label"] = report.corpus_label;
  out["N"] = report.chunks;
  out["M"] = report.clusters;
  out["d"] = report.dim;
  out["mean_tightness"] = report.mean_tightness;
  out["runs"] = report.runs;
  out["clusters_per_run"] = report.clusters_per_run;
  out["contended"] = report.contended;
  out["pipelines"] = json::object();
  for (const PipelineReport& p : report.pipelines) {
    json j;
    j["latency_ms"] = latency_json(p.end_to_end);
    j["retrieval_latency_ms"] = latency_json(p.retrieval);
    j["embed_latency_ms"] = latency_json(p.embed);
    j["comparisons"] = {{"centroid_comparisons", p.mean_centroid_comparisons},
                        {"member_comparisons", p.mean_member_comparisons}};
    j["hit_rate"] = p.hit_rate ? json(*p.hit_rate) : json(nullptr);
    j["hit_depth"] = p.hit_depth;
    j["queries_per_run"] = p.queries_per_run;
    out["pipelines"][std::string(to_string(p.pipeline))] = j;
  }
  const PipelineReport* mode = report.find(Pipeline::kMode);
  const PipelineReport* base = report.find(Pipeline::kBaseline);
  if (mode != nullptr && base != nullptr && mode->end_to_end.mean_ms > 0.0) {
    out["latency_speedup"] = base->end_to_end.mean_ms / mode->end_to_end.mean_ms;
  }
  return out.dump(indent);
}

std::string report_to_table(const BenchReport& report) {
  std::ostringstream s;
  s << "corpus: " << report.corpus_label << "  N=" << report.chunks << "  M=" << report.clusters
    << "  d=" << report.dim << "  runs=" << report.runs << "  mean_tightness=" << std::fixed << std::setprecision(4)
    << report.mean_tightness << (report.contended ? "  (contended: parallel replay)" : "") << "\n";
  s << std::left << std::setw(10) << "pipeline" << std::right << std::setw(11) << "mean_ms" << std::setw(11)
    << "p50_ms" << std::setw(11) << "p95_ms" << std::setw(14) << "retr_mean_ms" << std::setw(11) << "centroid"
    << std::setw(11) << "member" << std::setw(10) << "hit_rate" << "\n";
  for (const PipelineReport& p : report.pipelines) {
    s << std::left << std::setw(10) << to_string(p.pipeline) << std::right << std::setprecision(4) << std::setw(11)
      << p.end_to_end.mean_ms << std::setw(11) << p.end_to_end.p50_ms << std::setw(11) << p.end_to_end.p95_ms
      << std::setw(14) << p.retrieval.mean_ms << std::setprecision(1) << std::setw(11) << p.mean_centroid_comparisons
      << std::setw(11) << p.mean_member_comparisons << std::setprecision(3) << std::setw(10)
      << (p.hit_rate ? *p.hit_rate : std::nan("")) << "\n";
  }
  const PipelineReport* mode = report.find(Pipeline::kMode);
  const PipelineReport* base = report.find(Pipeline::kBaseline);
  if (mode != nullptr && base != nullptr && mode->end_to_end.mean_ms > 0.0) {
    s << "mean latency ratio baseline/mode: " << std::setprecision(2) << base->end_to_end.mean_ms / mode->end_to_end.mean_ms
      << "x\n";
  }
  return s.str();
}

std::string log_to_jsonl(const std::vector<QueryLogEntry>& log) {
  std::string out;
  for (const QueryLogEntry& e : log) {
    json j = {{"run", e.run},
              {"pipeline", to_string(e.pipeline)},
              {"query_index", e.query_index},
              {"end_to_end_ms", e.end_to_end_ms},
              {"embed_ms", e.embed_ms},
              {"retrieval_ms", e.retrieval_ms},
              {"rerank_ms", e.rerank_ms},
              {"centroid_comparisons", e.centroid_comparisons},
              {"member_comparisons", e.member_comparisons},
              {"hit", e.hit ? json(*e.hit) : json(nullptr)}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<QueryLogEntry> parse_log_jsonl(std::string_view content) {
  std::vector<QueryLogEntry> log;
  std::istringstream in{std::string(content)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    QueryLogEntry e;
    e.run = j.at("run").get<std::uint32_t>();
    e.pipeline = parse_pipeline(j.at("pipeline").get<std::string>());
    e.query_index = j.at("query_index").get<std::size_t>();
    e.end_to_end_ms = j.at("end_to_end_ms").get<double>();
    e.embed_ms = j.at("embed_ms").get<double>();
    e.retrieval_ms = j.at("retrieval_ms").get<double>();
    e.rerank_ms = j.at("rerank_ms").get<double>();
    e.centroid_comparisons = j.at("centroid_comparisons").get<std::uint64_t>();
    e.member_comparisons = j.at("member_comparisons").get<std::uint64_t>();
    if (!j.at("hit").is_null()) e.hit = j.at("hit").get<bool>();
    log.push_back(e);
  }
  return log;
}

// ---------------------------------------------------------------------------

TuneResult tune_min_cluster_size(const std::vector<Chunk>& chunks, std::span<const EmbeddingVector> embeddings,
                                 const ProviderSpec& provider, const ChunkParams& chunking,
                                 const ClusteringConfig& base, const EvalSet& evalset,
                                 const std::vector<std::uint32_t>& grid, const RouterConfig& router,
                                 std::shared_ptr<const Embedder> embedder) {
  if (grid.empty()) fail(ErrorKind::kInvalidArgument, "tuning grid is empty");
  TuneResult result;
  const BaselineConfig baseline;
  bool have_best = false;
  double best_rate = 0.0;
  for (std::uint32_t value : grid) {
    TuneRow row;
    row.min_cluster_size = value;
    try {
      ClusteringConfig config = base;
      config.min_cluster_size = value;
      if (config.max_cluster_size <= value) config.max_cluster_size = value + 1;
      BuildReport build;
      const ExpertIndex index =
          build_index_from_embeddings(chunks, embeddings, provider, chunking, config, &build);
      const PipelineRunner runner(index, router, baseline, embedder);
      row.hit_rate = hit_rate(runner, Pipeline::kMode, evalset, runner.default_depth(Pipeline::kMode));
      row.clusters = static_cast<std::uint32_t>(index.clusters.size());
      row.density_clusters = build.diagnostics.density_clusters;
      row.fallback = build.diagnostics.fallback;
      row.mean_tightness = index.stats.mean_tightness;
      row.ok = true;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kEvalSet) throw;
      row.error = e.what();
      result.warnings.push_back("min_cluster_size=" + std::to_string(value) + " skipped: " + e.what());
    }
    if (row.ok && (!have_best || row.hit_rate > best_rate ||
                   (row.hit_rate == best_rate && value < result.chosen))) {
      have_best = true;
      best_rate = row.hit_rate;
      result.chosen = value;
    }
    result.rows.push_back(std::move(row));
  }
  if (!have_best) fail(ErrorKind::kInvalidArgument, "every grid point failed to build");
  return result;
}

std::string tune_to_json(const TuneResult& result, int indent) {
  json out;
  out["chosen_min_cluster_size"] = result.chosen;
  out["sweep"] = json::array();
  for (const TuneRow& r : result.rows) {
    json j = {{"min_cluster_size", r.min_cluster_size}, {"ok", r.ok}};
    if (r.ok) {
      j["hit_rate"] = r.hit_rate;
      j["M"] = r.clusters;
      j["density_clusters"] = r.density_clusters;
      j["single_cluster_fallback"] = r.fallback;
      j["mean_tightness"] = r.mean_tightness;
    } else {
      j["error"] = r.error;
    }
    out["sweep"].push_back(j);
  }
  out["warnings"] = result.warnings;
  return out.dump(indent);
}

std::string tune_to_table(const TuneResult& result) {
  std::ostringstream s;
  s << std::right << std::setw(17) << "min_cluster_size" << std::setw(10) << "hit_rate" << std::setw(6) << "M"
    << std::setw(10) << "density" << std::setw(10) << "fallback" << std::setw(11) << "tightness" << "\n";
  for (const TuneRow& r : result.rows) {
    s << std::setw(17) << r.min_cluster_size;
    if (!r.ok) {
      s << "  failed: " << r.error << "\n";
      continue;
    }
    s << std::fixed << std::setprecision(3) << std::setw(10) << r.hit_rate << std::setw(6) << r.clusters
      << std::setw(10) << r.density_clusters << std::setw(10) << (r.fallback ? "yes" : "no") << std::setprecision(4)
      << std::setw(11) << r.mean_tightness << "\n";
  }
  s << "chosen min_cluster_size: " << result.chosen << "\n";
  return s.str();
}

}  // namespace docroute
