#include <benchmark/benchmark.h>

#include "topoveil/attack.hpp"
#include "topoveil/elaborate.hpp"
#include "topoveil/generators.hpp"
#include "topoveil/obnocs.hpp"

using namespace topoveil;

namespace {

Obfuscation star(int ips) {
  InsertOptions o;
  o.seed = 11;
  return insert_switches(star_topology(ips), {"X"}, o);
}

}  // namespace

static void BM_SatAttackStar(benchmark::State& state) {
  const auto ob = star(static_cast<int>(state.range(0)));
  const auto locked = elaborate(ob.design);
  std::uint64_t dips = 0;
  for (auto _ : state) {
    ExactOracle o(locked, ob.activation_package);
    const auto r = sat_attack(locked, o);
    dips = r.dip_count;
    benchmark::DoNotOptimize(r.recovered_key);
  }
  state.counters["dips"] = static_cast<double>(dips);
}
BENCHMARK(BM_SatAttackStar)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_BruteForceStar(benchmark::State& state) {
  const auto ob = star(static_cast<int>(state.range(0)));
  const auto locked = elaborate(ob.design);
  for (auto _ : state) {
    ExactOracle o(locked, ob.activation_package);
    benchmark::DoNotOptimize(brute_force_attack(locked, o).consistent_keys.size());
  }
}
BENCHMARK(BM_BruteForceStar)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);
