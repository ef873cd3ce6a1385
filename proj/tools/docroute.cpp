#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "docroute/bench.hpp"
#include "docroute/config.hpp"
#include "docroute/errors.hpp"
#include "docroute/index.hpp"
#include "json.hpp"

using namespace docroute;
using nlohmann::json;

namespace {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kProviderUnavailable:
    case ErrorKind::kProtocol:
      return 1;
    default:
      return 2;
  }
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path);
  out << content;
  if (!out) fail(ErrorKind::kIo, "write failed: " + path);
}

std::shared_ptr<const Embedder> embedder_for(const ProviderSpec& spec, const HttpOptions& http) {
  if (spec.kind == ProviderKind::kPlanted) return nullptr;
  return make_embedder(spec, http);
}

// Query-time provider: the index's own, with any embedding key the user
// set explicitly layered on top.
ProviderSpec query_provider(const ExpertIndex& index, const CliConfig& cfg) {
  ProviderSpec spec = index.provider;
  const auto set = [&](const char* key) { return cfg.explicit_keys.contains(std::string("embedding.") + key); };
  if (set("provider")) spec.kind = cfg.provider.kind;
  if (set("dim")) spec.dim = cfg.provider.dim;
  if (set("embed-seed")) spec.seed = cfg.provider.seed;
  if (set("endpoint")) spec.endpoint = cfg.provider.endpoint;
  if (set("batch-size")) spec.batch_size = cfg.provider.batch_size;
  if (set("model")) spec.model_name = cfg.provider.model_name;
  check_provider_matches(index.provider, spec);
  return spec;
}

json stats_json(const ExpertIndex& index) {
  json j;
  j["M"] = index.stats.clusters;
  j["N"] = index.stats.chunks;
  j["d"] = index.stats.dim;
  j["mean_tightness"] = index.stats.mean_tightness;
  j["noise_absorbed"] = index.stats.noise_absorbed;
  j["size_histogram"] = json::array();
  for (const auto& [size, count] : index.stats.size_histogram) {
    j["size_histogram"].push_back({{"size", size}, {"count", count}});
  }
  j["provider"] = {{"kind", to_string(index.provider.kind)},
                   {"dim", index.provider.dim},
                   {"seed", index.provider.seed},
                   {"model", index.provider.model_name}};
  std::vector<const IndexedCluster*> order;
  for (const IndexedCluster& c : index.clusters) order.push_back(&c);
  std::stable_sort(order.begin(), order.end(),
                   [](const IndexedCluster* a, const IndexedCluster* b) { return a->size > b->size; });
  j["clusters"] = json::array();
  for (const IndexedCluster* c : order) {
    j["clusters"].push_back({{"id", c->id}, {"size", c->size}, {"tightness", c->tightness}});
  }
  return j;
}

void print_stats_summary(const ExpertIndex& index, std::ostream& out) {
  out << "M=" << index.stats.clusters << " N=" << index.stats.chunks << " d=" << index.stats.dim
      << " mean_tightness=" << std::fixed << std::setprecision(4) << index.stats.mean_tightness
      << " noise_absorbed=" << index.stats.noise_absorbed << "\n";
  out << "size histogram:";
  for (const auto& [size, count] : index.stats.size_histogram) out << " " << size << "x" << count;
  out << "\n";
}

void print_cluster_table(const ExpertIndex& index, std::ostream& out) {
  const json j = stats_json(index);
  out << std::setw(8) << "cluster" << std::setw(8) << "size" << std::setw(12) << "tightness" << "\n";
  for (const json& c : j["clusters"]) {
    out << std::setw(8) << c["id"].get<std::uint32_t>() << std::setw(8) << c["size"].get<std::uint64_t>()
        << std::setw(12) << std::fixed << std::setprecision(4) << c["tightness"].get<double>() << "\n";
  }
}

std::vector<std::uint32_t> parse_grid(const std::string& text) {
  std::vector<std::uint32_t> grid;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      const unsigned long v = std::stoul(item, &used);
      if (used != item.size() || v == 0) throw std::invalid_argument(item);
      grid.push_back(static_cast<std::uint32_t>(v));
    } catch (const std::exception&) {
      fail(ErrorKind::kConfig, "invalid grid value '" + item + "'");
    }
  }
  if (grid.empty()) fail(ErrorKind::kConfig, "empty grid");
  return grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"docroute: cluster-and-route retrieval over a document corpus"};
  app.require_subcommand(1);
  app.fallthrough();
  app.get_formatter()->column_width(36);

  std::string config_path;
  app.add_option("--config", config_path, "TOML-style settings file; flags override its values");

  const CliConfig defaults;
  std::vector<std::string> raw(settings().size());
  std::vector<CLI::Option*> setting_opts;
  for (std::size_t i = 0; i < settings().size(); ++i) {
    const Setting& s = settings()[i];
    std::string names = "--" + s.key;
    if (!s.short_flag.empty()) names = s.short_flag + "," + names;
    CLI::Option* opt;
    if (s.value_type == "BOOL") {
      // A default string would be taken as the value of a bare flag.
      opt = app.add_option(names, raw[i], s.help + " (default " + s.get(defaults) + ")");
      opt->expected(0, 1);
    } else {
      opt = app.add_option(names, raw[i], s.help);
      opt->default_str(s.get(defaults));
    }
    opt->type_name(s.value_type);
    opt->group(s.section.empty() ? "general" : s.section);
    setting_opts.push_back(opt);
  }

  std::string corpus_path, index_path, query_text, evalset_path, synthetic, report_path, log_path, pipeline_name = "mode";
  std::string grid_text = "5,10,20,40,60";
  bool as_json = false;

  CLI::App* ingest = app.add_subcommand("ingest", "chunk, embed and cluster a corpus into an index file");
  ingest->add_option("corpus", corpus_path, "JSONL file or directory of .txt/.md files")->required();
  ingest->add_option("index", index_path, "output index path")->required();
  ingest->add_flag("--json", as_json, "print stats as JSON");

  CLI::App* query = app.add_subcommand("query", "answer a query from an index");
  query->add_option("index", index_path, "index path")->required();
  query->add_option("text", query_text, "query text")->required();
  query->add_option("--pipeline", pipeline_name, "mode or baseline")
      ->check(CLI::IsMember({"mode", "baseline"}))
      ->capture_default_str();
  query->add_flag("--json", as_json, "print the full result as JSON");

  CLI::App* bench = app.add_subcommand("bench", "time both pipelines over an evaluation set");
  bench->add_option("index", index_path, "index path (with --evalset)");
  bench->add_option("--evalset", evalset_path, "JSONL evaluation set");
  bench->add_option("--synthetic", synthetic, "planted corpus preset: small, medium or large")
      ->check(CLI::IsMember({"small", "medium", "large"}));
  bench->add_flag("--json", as_json, "print the report as JSON instead of a table");
  bench->add_option("--report", report_path, "also write the JSON report here");
  bench->add_option("--log", log_path, "write the per-query log (JSONL) here");

  CLI::App* stats = app.add_subcommand("stats", "print index statistics and per-cluster rows");
  stats->add_option("index", index_path, "index path")->required();
  stats->add_flag("--json", as_json, "print as JSON");

  CLI::App* tune = app.add_subcommand("tune", "sweep min-cluster-size and keep the best router hit rate");
  tune->add_option("--corpus", corpus_path, "corpus to index (with --evalset)");
  tune->add_option("--evalset", evalset_path, "JSONL evaluation set");
  tune->add_option("--synthetic", synthetic, "planted corpus preset: small, medium or large")
      ->check(CLI::IsMember({"small", "medium", "large"}));
  tune->add_option("--grid", grid_text, "comma-separated min-cluster-size values")->capture_default_str();
  tune->add_flag("--json", as_json, "print as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << one_line(e.what()) << "\n";
    return 2;
  }

  try {
    CliConfig cfg;
    if (!config_path.empty()) load_config_file(config_path, cfg);
    for (std::size_t i = 0; i < settings().size(); ++i) {
      if (setting_opts[i]->count() == 0) continue;
      const bool bare_flag = settings()[i].value_type == "BOOL" && raw[i].empty();
      apply_setting(cfg, settings()[i].qualified(), bare_flag ? "true" : raw[i]);
    }
    cfg.clustering.seed = cfg.seed;
    cfg.validate();

    if (ingest->parsed()) {
      const std::vector<Document> docs = load_corpus(corpus_path);
      const auto embedder = make_embedder(cfg.provider, cfg.http);
      BuildReport report;
      const ExpertIndex index = build_index(docs, cfg.chunking, *embedder, cfg.clustering, &report);
      save_index(index, index_path);
      for (const std::string& w : report.warnings) std::cerr << "warning: " << one_line(w) << "\n";
      if (as_json) {
        std::cout << stats_json(index).dump(2) << "\n";
      } else {
        std::cout << "wrote " << index_path << "\n";
        print_stats_summary(index, std::cout);
      }
      return 0;
    }

    if (query->parsed()) {
      const ExpertIndex index = load_index(index_path);
      const ProviderSpec spec = query_provider(index, cfg);
      const PipelineRunner runner(index, cfg.router, cfg.baseline, embedder_for(spec, cfg.http));
      const QueryResult result = runner.run(parse_pipeline(pipeline_name), Query{query_text, std::nullopt});
      if (as_json) {
        std::cout << to_json(result, JsonOptions{false, 2}) << "\n";
        return 0;
      }
      std::cout << result.context << "\n\n---\n";
      std::cout << "pipeline: " << to_string(result.pipeline) << "\n";
      std::cout << std::fixed << std::setprecision(4);
      if (result.pipeline == Pipeline::kMode) {
        std::cout << "clusters:";
        for (const ClusterScore& c : result.selected_clusters) std::cout << " " << c.cluster_id << "(" << c.score << ")";
        std::cout << "\n";
      } else {
        std::cout << "clusters: none (flat scan of " << index.size() << " chunks)\n";
      }
      std::cout << "chunks:";
      for (const ScoredChunk& c : result.chunks) std::cout << " " << c.chunk_id << "(" << c.score << ")";
      std::cout << "\ncontext_chunks: " << result.context_chunks << "\n";
      std::cout << "comparisons: centroid=" << result.counters.centroid_comparisons
                << " member=" << result.counters.member_comparisons << "\n";
      const auto ms = [](std::chrono::nanoseconds d) { return std::chrono::duration<double, std::milli>(d).count(); };
      std::cout << "latency_ms: end_to_end=" << ms(result.counters.end_to_end) << " embed=" << ms(result.counters.embed)
                << " retrieval=" << ms(result.counters.retrieval) << "\n";
      return 0;
    }

    if (bench->parsed()) {
      BenchOptions options;
      options.router = cfg.router;
      options.baseline = cfg.baseline;
      options.clustering = cfg.clustering;
      options.measure.warmup = cfg.warmup;
      options.measure.parallel = cfg.parallel;
      options.runs = cfg.runs;
      options.seed = cfg.seed;
      options.synthetic_queries = cfg.queries;
      options.query_noise = cfg.query_noise;

      BenchReport report;
      if (!synthetic.empty()) {
        if (!index_path.empty() || !evalset_path.empty()) {
          fail(ErrorKind::kConfig, "--synthetic cannot be combined with an index or --evalset");
        }
        SyntheticSpec spec = synthetic_preset(synthetic);
        report = run_synthetic_bench(spec, options, "synthetic-" + synthetic);
      } else {
        if (index_path.empty() || evalset_path.empty()) {
          fail(ErrorKind::kConfig, "bench needs an index and --evalset, or --synthetic");
        }
        const ExpertIndex index = load_index(index_path);
        const EvalSet evalset = load_evalset(evalset_path);
        const ProviderSpec spec = query_provider(index, cfg);
        report = run_bench(index, evalset, options, embedder_for(spec, cfg.http), index_path);
      }
      if (!report_path.empty()) write_file(report_path, report_to_json(report) + "\n");
      if (!log_path.empty()) write_file(log_path, log_to_jsonl(report.log));
      if (as_json) {
        std::cout << report_to_json(report) << "\n";
      } else {
        std::cout << report_to_table(report);
      }
      return 0;
    }

    if (stats->parsed()) {
      const ExpertIndex index = load_index(index_path);
      if (as_json) {
        std::cout << stats_json(index).dump(2) << "\n";
      } else {
        print_stats_summary(index, std::cout);
        print_cluster_table(index, std::cout);
      }
      return 0;
    }

    if (tune->parsed()) {
      const std::vector<std::uint32_t> grid = parse_grid(grid_text);
      TuneResult result;
      if (!synthetic.empty()) {
        if (!corpus_path.empty() || !evalset_path.empty()) {
          fail(ErrorKind::kConfig, "--synthetic cannot be combined with --corpus or --evalset");
        }
        SyntheticSpec spec = synthetic_preset(synthetic);
        spec.seed = cfg.seed;
        const SyntheticCorpus corpus = synth_corpus(spec);
        const EvalSet evalset = make_synthetic_evalset(corpus, cfg.queries, cfg.query_noise, cfg.seed);
        result = tune_min_cluster_size(corpus.chunks, corpus.embeddings, corpus.provider, ChunkParams{},
                                       cfg.clustering, evalset, grid, cfg.router);
      } else {
        if (corpus_path.empty() || evalset_path.empty()) {
          fail(ErrorKind::kConfig, "tune needs --corpus and --evalset, or --synthetic");
        }
        const std::vector<Document> docs = load_corpus(corpus_path);
        const EvalSet evalset = load_evalset(evalset_path);
        std::shared_ptr<const Embedder> embedder = make_embedder(cfg.provider, cfg.http);
        const std::vector<Chunk> chunks = chunk_corpus(docs, cfg.chunking);
        std::vector<std::string> texts;
        for (const Chunk& c : chunks) texts.push_back(c.text);
        const std::vector<EmbeddingVector> vectors = embedder->embed_batch(texts);
        result = tune_min_cluster_size(chunks, vectors, cfg.provider, cfg.chunking, cfg.clustering, evalset, grid,
                                       cfg.router, embedder);
      }
      for (const std::string& w : result.warnings) std::cerr << "warning: " << one_line(w) << "\n";
      std::cout << (as_json ? tune_to_json(result) + "\n" : tune_to_table(result));
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << one_line(e.what()) << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << one_line(e.what()) << "\n";
    return 1;
  }
  return 0;
}
