#pragma once

#include <set>
#include <string>

#include "topoveil/generators.hpp"
#include "topoveil/netlist.hpp"
#include "topoveil/obnocs.hpp"
#include "topoveil/workload.hpp"

namespace fixtures {

/// Router X of a four-IP star behind switches: four 4:1 lanes per stage.
topoveil::Obfuscation star4(int stages = 1, std::uint64_t seed = 11);

/// Tree SoC with R1, R3, R4 and R5 fully redacted: sixteen 4:1 lanes.
topoveil::Obfuscation tree_full(std::uint64_t seed = 5);

/// Tree SoC with only R1 redacted.
topoveil::Obfuscation tree_r1(std::uint64_t seed = 5);

/// y = a XOR k.
topoveil::Netlist one_bit_lock();

/// Random combinational netlist with `k` key bits spliced in after random
/// cells, each as an XOR or a MUX between the net and its complement.
topoveil::Netlist random_lock(std::uint64_t seed, int k, int inputs = 6);

/// Workload touching every R1 out-link of the tree SoC; IP6 hosts the ALU.
topoveil::Workload tree_workload();

/// Elaborated tree_r1 with the endpoints fed by three of R1's four
/// candidates demoted to internal nets and the result synthesized: only the
/// lane into IP6 survives.
struct Collapse {
  topoveil::Obfuscation ob;
  topoveil::Netlist pre;
  topoveil::Netlist post;
  std::set<std::string> dropped;
};
Collapse collapse();

}  // namespace fixtures
