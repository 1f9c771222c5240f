#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "topoveil/netlist.hpp"
#include "topoveil/sat.hpp"

namespace topoveil {

/// Tseitin encoding target: hands out variables and accepts clauses.
struct ClauseSink {
  std::function<int()> new_var;
  std::function<void(std::span<const Lit>)> add;
};

ClauseSink sink_for(Engine& e);

/// Encodes one copy of a combinational netlist. Nets present in `bound`
/// reuse the given variables (shared inputs, keys); every other net gets a
/// fresh variable. Returns the full net -> variable map. Clause counts per
/// cell: AND/OR 3, XOR 4, NOT/BUF 2, MUX2 4, CONST 1. Throws
/// SequentialNetlist if the netlist has DFFs.
std::map<std::string, int> encode_netlist(const Netlist& n, const ClauseSink& sink,
                                          const std::map<std::string, int>& bound = {});

struct CnfInstance {
  Dimacs cnf;
  /// "<net>@<copy>" -> variable; the miter output is "$miter@0".
  std::map<std::string, int> vars;
  std::vector<std::string> inputs;   // non-key input nets, shared by copies
  std::vector<std::string> keys;     // key nets
  std::vector<std::string> outputs;  // output nets

  int var(const std::string& net, int copy) const;
  /// DIMACS with "c var <id> = <net>@<copy>" comment lines.
  std::string to_dimacs() const;
};

/// copies == 1: the circuit alone. copies == 2: two copies sharing non-key
/// inputs, each with its own key, plus an asserted miter (some output
/// differs). Throws SequentialNetlist or SchemaError for other copy counts.
CnfInstance to_cnf(const Netlist& n, int copies = 1);

}  // namespace topoveil
