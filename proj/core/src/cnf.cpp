#include "topoveil/cnf.hpp"

#include <sstream>

#include "topoveil/error.hpp"

namespace topoveil {

ClauseSink sink_for(Engine& e) {
  return ClauseSink{[&e] { return e.new_var(); }, [&e](std::span<const Lit> c) { e.add_clause(c); }};
}

std::map<std::string, int> encode_netlist(const Netlist& n, const ClauseSink& sink,
                                          const std::map<std::string, int>& bound) {
  if (has_dff(n)) throw Error(ErrorCode::SequentialNetlist, n.name + " has DFFs; encode its combinational frame");
  std::map<std::string, int> var = bound;
  auto v = [&](const std::string& net) {
    auto it = var.find(net);
    if (it != var.end()) return it->second;
    const int x = sink.new_var();
    var.emplace(net, x);
    return x;
  };
  for (const auto& net : n.nets) v(net);
  auto add = [&](std::initializer_list<Lit> c) { sink.add(std::span<const Lit>(c.begin(), c.size())); };

  for (std::size_t idx : topo_order(n)) {
    const Cell& c = n.cells[idx];
    const int y = v(c.output());
    switch (c.kind) {
      case CellKind::And: {
        const int a = v(c.pin("a")), b = v(c.pin("b"));
        add({-y, a});
        add({-y, b});
        add({y, -a, -b});
        break;
      }
      case CellKind::Or: {
        const int a = v(c.pin("a")), b = v(c.pin("b"));
        add({y, -a});
        add({y, -b});
        add({-y, a, b});
        break;
      }
      case CellKind::Xor: {
        const int a = v(c.pin("a")), b = v(c.pin("b"));
        add({-y, a, b});
        add({-y, -a, -b});
        add({y, -a, b});
        add({y, a, -b});
        break;
      }
      case CellKind::Not: {
        const int a = v(c.pin("a"));
        add({y, a});
        add({-y, -a});
        break;
      }
      case CellKind::Buf: {
        const int a = v(c.pin("a"));
        add({-y, a});
        add({y, -a});
        break;
      }
      case CellKind::Mux2: {
        const int a = v(c.pin("a")), b = v(c.pin("b")), s = v(c.pin("sel"));
        add({s, -a, y});
        add({s, a, -y});
        add({-s, -b, y});
        add({-s, b, -y});
        break;
      }
      case CellKind::Const0: add({-y}); break;
      case CellKind::Const1: add({y}); break;
      case CellKind::Dff: break;  // unreachable
    }
  }
  return var;
}

int CnfInstance::var(const std::string& net, int copy) const {
  auto it = vars.find(net + "@" + std::to_string(copy));
  if (it == vars.end()) throw Error(ErrorCode::UnknownSignal, net + "@" + std::to_string(copy));
  return it->second;
}

std::string CnfInstance::to_dimacs() const {
  Dimacs d = cnf;
  std::vector<std::pair<int, std::string>> byvar;
  for (const auto& [name, x] : vars) byvar.emplace_back(x, name);
  std::sort(byvar.begin(), byvar.end());
  d.comments.clear();
  for (const auto& [x, name] : byvar) d.comments.push_back("var " + std::to_string(x) + " = " + name);
  return write_dimacs(d);
}

CnfInstance to_cnf(const Netlist& n, int copies) {
  if (copies != 1 && copies != 2) throw Error(ErrorCode::SchemaError, "copies must be 1 or 2");
  if (has_dff(n)) throw Error(ErrorCode::SequentialNetlist, n.name + " has DFFs; encode its combinational frame");
  CnfInstance inst;
  ClauseSink sink{[&] { return ++inst.cnf.vars; },
                  [&](std::span<const Lit> c) { inst.cnf.clauses.emplace_back(c.begin(), c.end()); }};
  for (const auto& p : n.inputs) {
    auto nets = port_nets(p);
    auto& dst = p.name == kKeyPort ? inst.keys : inst.inputs;
    dst.insert(dst.end(), nets.begin(), nets.end());
  }
  inst.outputs = output_bit_nets(n);

  std::map<std::string, int> shared;
  for (const auto& net : inst.inputs) shared[net] = sink.new_var();
  std::vector<std::map<std::string, int>> maps;
  for (int k = 0; k < copies; ++k) {
    maps.push_back(encode_netlist(n, sink, shared));
    for (const auto& [net, x] : maps.back()) inst.vars[net + "@" + std::to_string(k)] = x;
  }
  if (copies == 2) {
    std::vector<Lit> any;
    for (const auto& o : inst.outputs) {
      const int a = maps[0].at(o), b = maps[1].at(o);
      const int d = sink.new_var();
      const Lit c1[] = {-d, a, b}, c2[] = {-d, -a, -b}, c3[] = {d, -a, b}, c4[] = {d, a, -b};
      for (auto* c : {c1, c2, c3, c4}) sink.add(std::span<const Lit>(c, 3));
      any.push_back(d);
    }
    const int m = sink.new_var();
    inst.vars["$miter@0"] = m;
    std::vector<Lit> big{-m};
    big.insert(big.end(), any.begin(), any.end());
    sink.add(big);
    for (Lit d : any) {
      const Lit c[] = {m, -d};
      sink.add(c);
    }
    const Lit unit[] = {m};
    sink.add(unit);
  }
  return inst;
}

}  // namespace topoveil
