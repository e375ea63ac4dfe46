#include <benchmark/benchmark.h>

#include <random>

#include "recsim/engine.hpp"
#include "recsim/recommender.hpp"

using namespace recsim;

namespace {

RunConfig bench_config(std::size_t n) {
  RunConfig c;
  c.scenario = ScenarioKind::Balanced;
  c.population.kind = PopulationSource::Kind::Generated;
  c.population.n = n;
  c.population.seed = 1;
  c.fixtures_dir = RECSIM_FIXTURES_DIR;
  c.threads = 1;
  return c;
}

void BM_SelectRanked(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto kind = static_cast<ScenarioKind>(state.range(1));
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<std::string> ids(n);
  std::vector<RankedItem> items(n);
  for (std::size_t i = 0; i < n; ++i) {
    ids[i] = "p" + std::to_string(i);
    items[i] = RankedItem{unit(gen), ids[i], i};
  }
  for (auto _ : state) {
    auto chosen = select_ranked(kind, items, n / 3, 0.5);
    benchmark::DoNotOptimize(chosen.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_SelectRanked)->ArgsProduct({{30, 90, 1000}, {0, 1, 2}});

void BM_Affinity(benchmark::State& state) {
  auto agents = generate_population(64, 3);
  const auto config = bench_config(64);
  const auto pool = load_content(config);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& a = agents[i % agents.size()];
    const auto& p = pool.post(static_cast<PostIndex>(i % pool.size()));
    benchmark::DoNotOptimize(affinity(a, p));
    ++i;
  }
}
BENCHMARK(BM_Affinity);

void BM_RunDay(benchmark::State& state) {
  const auto config = bench_config(static_cast<std::size_t>(state.range(0)));
  DeterministicBackend backend;
  auto fresh = make_state(config, load_population(config), load_content(config));
  for (auto _ : state) {
    state.PauseTiming();
    auto s = fresh;
    state.ResumeTiming();
    auto out = run_day(s, config, backend);
    benchmark::DoNotOptimize(out.impact.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunDay)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
