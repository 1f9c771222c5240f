#include <benchmark/benchmark.h>

#include "topoveil/generators.hpp"
#include "topoveil/obnocs.hpp"

using namespace topoveil;

static void BM_EnumerateStar(benchmark::State& state) {
  InsertOptions o;
  o.seed = 11;
  const auto ob = insert_switches(star_topology(static_cast<int>(state.range(0))), {"X"}, o);
  EnumerateOptions eo;
  eo.threads = 1;
  for (auto _ : state) {
    std::uint64_t functional = 0;
    for_each_key(ob.design, nullptr, eo, [&](const KeyRecord& r) {
      functional += r.cls != TopologyClass::NonFunctional ? 1 : 0;
    });
    benchmark::DoNotOptimize(functional);
  }
  state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << ob.design.key_length));
}
BENCHMARK(BM_EnumerateStar)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_InsertSwitchesTree(benchmark::State& state) {
  const auto t = example_tree_soc();
  std::uint64_t seed = 0;
  for (auto _ : state) {
    InsertOptions o;
    o.seed = seed++;
    o.stages = static_cast<int>(state.range(0));
    benchmark::DoNotOptimize(insert_switches(t, {"R1", "R3", "R4", "R5"}, o));
  }
}
BENCHMARK(BM_InsertSwitchesTree)->Arg(1)->Arg(2);

static void BM_InduceTree(benchmark::State& state) {
  InsertOptions o;
  o.seed = 5;
  const auto ob = insert_switches(example_tree_soc(), {"R1", "R3", "R4", "R5"}, o);
  for (auto _ : state) benchmark::DoNotOptimize(induce_topology(ob.design, ob.activation_package));
}
BENCHMARK(BM_InduceTree);
