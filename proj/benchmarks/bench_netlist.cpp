#include <benchmark/benchmark.h>

#include "topoveil/elaborate.hpp"
#include "topoveil/generators.hpp"
#include "topoveil/obnocs.hpp"
#include "topoveil/optimize.hpp"
#include "topoveil/potent.hpp"

using namespace topoveil;

static void BM_ElaborateTree(benchmark::State& state) {
  InsertOptions o;
  o.seed = 5;
  const auto ob = insert_switches(example_tree_soc(), {"R1", "R3", "R4", "R5"}, o);
  for (auto _ : state) benchmark::DoNotOptimize(elaborate(ob.design));
}
BENCHMARK(BM_ElaborateTree);

static void BM_SynthesizeLite(benchmark::State& state) {
  RandomNetlistOptions o;
  o.inputs = 16;
  o.outputs = 8;
  o.gates = static_cast<int>(state.range(0));
  const auto n = random_netlist(7, o);
  for (auto _ : state) benchmark::DoNotOptimize(synthesize_lite(n));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SynthesizeLite)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

static void BM_LehmerRoundTrip(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::uint64_t fact = 1;
  for (int i = 2; i <= n; ++i) fact *= static_cast<std::uint64_t>(i);
  std::uint64_t k = 0;
  for (auto _ : state) {
    const auto p = lehmer_permutation(n, k);
    benchmark::DoNotOptimize(lehmer_rank(p));
    k = (k + 7919) % fact;
  }
}
BENCHMARK(BM_LehmerRoundTrip)->Arg(4)->Arg(8)->Arg(12)->Arg(20);
