#include "fixtures.hpp"

#include "topoveil/elaborate.hpp"
#include "topoveil/optimize.hpp"
#include "topoveil/prng.hpp"

namespace fixtures {

using namespace topoveil;

Obfuscation star4(int stages, std::uint64_t seed) {
  InsertOptions o;
  o.stages = stages;
  o.seed = seed;
  return insert_switches(star_topology(4), {"X"}, o);
}

Obfuscation tree_full(std::uint64_t seed) {
  InsertOptions o;
  o.seed = seed;
  return insert_switches(example_tree_soc(), {"R1", "R3", "R4", "R5"}, o);
}

Obfuscation tree_r1(std::uint64_t seed) {
  InsertOptions o;
  o.seed = seed;
  return insert_switches(example_tree_soc(), {"R1"}, o);
}

Netlist one_bit_lock() {
  NetlistBuilder b("lock1");
  const auto a = b.add_input("a");
  const auto k = b.add_input(std::string(kKeyPort));
  const auto y = b.add_output("y");
  b.xor_(a[0], k[0], y[0]);
  return std::move(b).build();
}

Netlist random_lock(std::uint64_t seed, int k, int inputs) {
  RandomNetlistOptions o;
  o.inputs = inputs;
  o.outputs = 3;
  o.gates = 25;
  NetlistBuilder b(random_netlist(seed, o));
  const auto key = b.add_input(std::string(kKeyPort), k);
  SplitMix64 rng(seed);
  std::vector<std::size_t> pick(b.netlist().cells.size());
  for (std::size_t i = 0; i < pick.size(); ++i) pick[i] = i;
  fisher_yates(std::span<std::size_t>(pick), rng);
  for (int i = 0; i < k; ++i) {
    auto& cell = b.netlist().cells[pick[static_cast<std::size_t>(i) % pick.size()]];
    const std::string old = cell.output();
    const std::string tmp = old + "$pre" + std::to_string(i);
    cell.pins[std::string(output_pin(cell.kind))] = tmp;
    b.netlist().nets.push_back(tmp);
    if (rng.below(2) != 0) {
      b.xor_(tmp, key[i], old);
    } else {
      b.mux(tmp, b.not_(tmp), key[i], old);
    }
  }
  return std::move(b).build();
}

Workload tree_workload() {
  return {
      {"IP1", "IP6", AluOp::Add, 20, 22},
      {"IP2", "IP1", AluOp::Sub, 7, 9},
      {"IP3", "IP4", AluOp::Xor, 0x5a, 0x0f},
      {"IP5", "IP8", AluOp::Or, 3, 12},
      {"IP9", "IP6", AluOp::And, 0xff, 0x3c},
  };
}

Collapse collapse() {
  Collapse c{tree_r1(), {}, {}, {}};
  for (const auto& g : c.ob.design.groups) {
    for (const auto& lane : g.lanes) {
      if (lane.target.node != "IP6") c.dropped.insert(in_port_name(lane.target));
    }
  }
  c.pre = elaborate(c.ob.design);
  c.post = synthesize_lite(drop_outputs(c.pre, c.dropped));
  return c;
}

}  // namespace fixtures
