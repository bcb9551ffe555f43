#include <benchmark/benchmark.h>

#include <random>

#include "resim/asyncsim.hpp"
#include "resim/filter.hpp"
#include "resim/graph.hpp"
#include "resim/msr.hpp"
#include "resim/scenario.hpp"

using namespace resim;

namespace {

Digraph random_graph(int n, double p, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  Digraph g(n, 1.0 / n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && coin(rng) < p) g.add_edge(j, i, 1.0 / n);
  g.validate();
  return g;
}

void BM_RobustnessCheck(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Digraph g = random_graph(n, 0.6, 42);
  for (auto _ : state) {
    auto rep = is_rs_robust(g, 2, 2, 20);
    benchmark::DoNotOptimize(rep.holds);
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_RobustnessCheck)->DenseRange(5, 11, 2)->Complexity();

void BM_Filter(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> val(-5.0, 5.0);
  std::vector<std::pair<int, double>> rel;
  for (int j = 0; j < m; ++j) rel.emplace_back(j, val(rng));
  for (auto _ : state) {
    auto d = dp_msr_filter(rel, 2);
    benchmark::DoNotOptimize(d.kept.size());
  }
}
BENCHMARK(BM_Filter)->Arg(8)->Arg(32)->Arg(128);

Scenario bench_scenario(int n, bool async_mode) {
  Scenario sc;
  sc.name = "bench";
  sc.mode = async_mode ? Mode::Async : Mode::Sync;
  sc.params = {0.3, 3.67, n, 1};
  sc.graph = random_graph(n, 0.6, 99);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> pos(-5.0, 5.0);
  for (int i = 0; i < n; ++i) {
    sc.x0.push_back(pos(rng));
    sc.v0.push_back(0.0);
  }
  sc.offsets.assign(n, 0.0);
  sc.adversary = {AdversaryKind::FTotal, 1, {0}};
  sc.strategies[0] = StrategySpec{.type = "oscillate", .low = -4.0, .high = 4.0};
  if (async_mode) {
    sc.tau = 5;
    sc.delays.tau = 5;
    sc.delays.default_rule = {DelayRule::Kind::Parity, 0, 1, 2, {}};
    sc.updates.per_agent.assign(n, UpdateRule{});
    for (int i = 0; i < n; ++i)
      sc.updates.per_agent[i] = {UpdateRule::Kind::Periodic, 3, i % 3, {}};
  }
  sc.horizon = 256;
  return sc;
}

void BM_SyncRun(benchmark::State& state) {
  Scenario sc = bench_scenario(static_cast<int>(state.range(0)), false);
  for (auto _ : state) {
    Trace t = run_sync(sc);
    benchmark::DoNotOptimize(t.steps.size());
  }
  state.SetItemsProcessed(state.iterations() * sc.horizon);
}
BENCHMARK(BM_SyncRun)->Arg(5)->Arg(10)->Arg(20)->Arg(50);

void BM_AsyncRun(benchmark::State& state) {
  Scenario sc = bench_scenario(static_cast<int>(state.range(0)), true);
  for (auto _ : state) {
    Trace t = run_async(sc);
    benchmark::DoNotOptimize(t.steps.size());
  }
  state.SetItemsProcessed(state.iterations() * sc.horizon);
}
BENCHMARK(BM_AsyncRun)->Arg(5)->Arg(10)->Arg(20)->Arg(50);

}  // namespace

BENCHMARK_MAIN();
