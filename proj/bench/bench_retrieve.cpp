#include <benchmark/benchmark.h>

#include "layoutsearch/eval.hpp"
#include "layoutsearch/query.hpp"

using namespace layoutsearch;

namespace {

struct Fixture {
  CorpusStore store;
  std::vector<NamedLayout> battery;
};

const Fixture& fixture(std::size_t docs) {
  static std::map<std::size_t, Fixture> cache;
  auto it = cache.find(docs);
  if (it != cache.end()) return it->second;
  SynthParams p;
  p.seed = 5;
  p.docs = docs;
  p.plant = standard_battery(6, 2);
  p.plant_rate = 0.3;
  p.background_decoys = 1;
  Fixture f;
  f.store = build_store(synth_corpus(p).pages);
  f.battery = p.plant;
  return cache.emplace(docs, std::move(f)).first->second;
}

void run(benchmark::State& state, RetrieveOptions opts) {
  const Fixture& f = fixture(static_cast<std::size_t>(state.range(0)));
  std::size_t q = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(retrieve(f.store, f.battery[q].layout, opts));
    q = (q + 1) % f.battery.size();
  }
}

void BM_retrieve_parallel(benchmark::State& state) { run(state, {true, true}); }
void BM_retrieve_serial(benchmark::State& state) { run(state, {true, false}); }
void BM_retrieve_no_hash(benchmark::State& state) { run(state, {false, true}); }

void BM_build_store(benchmark::State& state) {
  SynthParams p;
  p.seed = 7;
  p.docs = static_cast<std::size_t>(state.range(0));
  const auto pages = synth_corpus(p).pages;
  for (auto _ : state) benchmark::DoNotOptimize(build_store(pages));
}

}  // namespace

BENCHMARK(BM_retrieve_parallel)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_retrieve_serial)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_retrieve_no_hash)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_build_store)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
