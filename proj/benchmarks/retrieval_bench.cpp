#include <benchmark/benchmark.h>

#include <map>

#include "docroute/bench.hpp"

using namespace docroute;

namespace {

struct Planted {
  SyntheticCorpus corpus;
  ExpertIndex index;
  EvalSet queries;
};

const Planted& planted(std::uint32_t per_topic) {
  static std::map<std::uint32_t, Planted> cache;
  auto it = cache.find(per_topic);
  if (it == cache.end()) {
    Planted p;
    p.corpus = synth_corpus(SyntheticSpec{10, per_topic, 64, 0.05, 0});
    p.index = build_synthetic_index(p.corpus, ClusteringConfig{});
    p.queries = make_synthetic_evalset(p.corpus, 64, 0.05, 1);
    it = cache.emplace(per_topic, std::move(p)).first;
  }
  return it->second;
}

void BM_Route(benchmark::State& state) {
  const Planted& p = planted(static_cast<std::uint32_t>(state.range(0)));
  Router router(p.index, RouterConfig{2, 5});
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(router.answer(p.queries.items[i++ % p.queries.items.size()].query));
  }
  state.counters["N"] = static_cast<double>(p.index.size());
  state.counters["M"] = static_cast<double>(p.index.clusters.size());
}
BENCHMARK(BM_Route)->Arg(10)->Arg(20)->Arg(50)->Arg(200);

void BM_FlatScan(benchmark::State& state) {
  const Planted& p = planted(static_cast<std::uint32_t>(state.range(0)));
  std::size_t i = 0;
  for (auto _ : state) {
    InstrumentationCounters counters;
    benchmark::DoNotOptimize(flat_retrieve(*p.queries.items[i++ % p.queries.items.size()].query.embedding, p.index, 10,
                                           counters));
  }
  state.counters["N"] = static_cast<double>(p.index.size());
}
BENCHMARK(BM_FlatScan)->Arg(10)->Arg(20)->Arg(50)->Arg(200);

void BM_BuildIndex(benchmark::State& state) {
  const SyntheticCorpus corpus =
      synth_corpus(SyntheticSpec{10, static_cast<std::uint32_t>(state.range(0)), 64, 0.05, 0});
  for (auto _ : state) benchmark::DoNotOptimize(build_synthetic_index(corpus, ClusteringConfig{}));
  state.counters["N"] = static_cast<double>(corpus.chunks.size());
}
BENCHMARK(BM_BuildIndex)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_DeterministicEmbed(benchmark::State& state) {
  const std::string text(
      "retrieval routes each query to the closest cluster centroids and scans only their members ");
  for (auto _ : state) benchmark::DoNotOptimize(deterministic_embed(text, 1024, 0));
}
BENCHMARK(BM_DeterministicEmbed);

}  // namespace

BENCHMARK_MAIN();
