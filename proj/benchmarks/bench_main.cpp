#include <benchmark/benchmark.h>

#include <cmath>

#include "gsort/edge_partition.hpp"
#include "gsort/leveled_sort.hpp"
#include "gsort/poset.hpp"
#include "gsort/rng.hpp"
#include "gsort/sparse_sort.hpp"

using namespace gsort;

namespace {

double dense_p(std::size_t n) { return std::min(1.0, 8 * std::log(static_cast<double>(n)) / static_cast<double>(n)); }

void BM_StochasticSort(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto inst = SortingInstance::generate(n, dense_p(n), 1);
  std::size_t queries = 0;
  for (auto _ : state) {
    const auto out = stochastic_sort(inst, {}, 7);
    queries = out.queries;
    benchmark::DoNotOptimize(out.order.data());
  }
  state.counters["queries"] = static_cast<double>(queries);
  state.counters["q/(n log2 np)"] =
      static_cast<double>(queries) / (static_cast<double>(n) * std::log2(static_cast<double>(n) * dense_p(n)));
}
BENCHMARK(BM_StochasticSort)->RangeMultiplier(2)->Range(256, 4096)->Unit(benchmark::kMillisecond);

void BM_SparseSortFallback(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto inst = SortingInstance::generate(n, 0.2, 2);
  std::size_t queries = 0;
  for (auto _ : state) {
    CountingOracle oracle(inst);
    FallbackPredictionSorter fb;
    const auto out = sparse_generalized_sort(oracle, {}, &fb, 3);
    queries = out.queries;
    benchmark::DoNotOptimize(out.order.data());
  }
  state.counters["queries"] = static_cast<double>(queries);
}
BENCHMARK(BM_SparseSortFallback)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_SolveAlpha(benchmark::State& state) {
  const int q = static_cast<int>(state.range(0));
  double p = 0.001;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_alpha(p, q));
    p = p < 0.99 ? p * 1.01 : 0.001;
  }
}
BENCHMARK(BM_SolveAlpha)->Arg(2)->Arg(8)->Arg(32);

void BM_PartitionBuild(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto inst = SortingInstance::generate(n, dense_p(n), 4);
  const int q = default_level_count(n, inst.p());
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const auto part = EdgePartition::build(inst, q, ++seed);
    benchmark::DoNotOptimize(part.alpha());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(inst.edge_count()));
}
BENCHMARK(BM_PartitionBuild)->Arg(1024)->Arg(4096);

DirectedKnowledge random_poset(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  DirectedKnowledge k(n);
  for (std::size_t t = 0; t < n; ++t) {
    std::size_t a = rng.below(n);
    std::size_t b = rng.below(n);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    k.add(static_cast<Vertex>(a), static_cast<Vertex>(b));
  }
  return k;
}

void BM_ExactRankSums(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto k = random_poset(n, 5);
  for (auto _ : state) benchmark::DoNotOptimize(exact_rank_sums(k, 18).extensions);
}
BENCHMARK(BM_ExactRankSums)->Arg(8)->Arg(12)->Arg(16);

void BM_McmcRanks(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto k = random_poset(n, 6);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(average_ranks(k, RankMode::sampled(200), ++seed).data());
}
BENCHMARK(BM_McmcRanks)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
