#include "topoveil/netlist.hpp"

#include <algorithm>
#include <array>
#include <queue>
#include <unordered_map>

#include "json_io.hpp"
#include "topoveil/error.hpp"

namespace topoveil {

namespace {

constexpr std::array<std::string_view, 2> kAB = {"a", "b"};
constexpr std::array<std::string_view, 1> kA = {"a"};
constexpr std::array<std::string_view, 3> kMux = {"a", "b", "sel"};
constexpr std::array<std::string_view, 2> kDff = {"d", "clk"};

}  // namespace

std::string_view to_string(CellKind k) {
  switch (k) {
    case CellKind::And: return "AND";
    case CellKind::Or: return "OR";
    case CellKind::Not: return "NOT";
    case CellKind::Xor: return "XOR";
    case CellKind::Mux2: return "MUX2";
    case CellKind::Const0: return "CONST0";
    case CellKind::Const1: return "CONST1";
    case CellKind::Dff: return "DFF";
    case CellKind::Buf: return "BUF";
  }
  return "?";
}

std::optional<CellKind> cell_kind_from_string(std::string_view s) {
  for (auto k : {CellKind::And, CellKind::Or, CellKind::Not, CellKind::Xor, CellKind::Mux2,
                 CellKind::Const0, CellKind::Const1, CellKind::Dff, CellKind::Buf}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::span<const std::string_view> input_pins(CellKind k) {
  switch (k) {
    case CellKind::And:
    case CellKind::Or:
    case CellKind::Xor: return kAB;
    case CellKind::Not:
    case CellKind::Buf: return kA;
    case CellKind::Mux2: return kMux;
    case CellKind::Dff: return kDff;
    case CellKind::Const0:
    case CellKind::Const1: return {};
  }
  return {};
}

std::string_view output_pin(CellKind k) { return k == CellKind::Dff ? "q" : "y"; }

bool is_commutative(CellKind k) {
  return k == CellKind::And || k == CellKind::Or || k == CellKind::Xor;
}

const std::string& Cell::pin(std::string_view name) const {
  auto it = pins.find(std::string(name));
  if (it == pins.end()) {
    throw Error(ErrorCode::SchemaError, "cell " + id + " has no pin '" + std::string(name) + "'");
  }
  return it->second;
}

std::string port_bit_net(const Port& p, int bit) {
  if (p.width == 1) return p.name;
  return p.name + "[" + std::to_string(bit) + "]";
}

std::vector<std::string> port_nets(const Port& p) {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(p.width));
  for (int i = 0; i < p.width; ++i) out.push_back(port_bit_net(p, i));
  return out;
}

std::vector<std::string> input_bit_nets(const Netlist& n) {
  std::vector<std::string> out;
  for (const auto& p : n.inputs) {
    for (auto& s : port_nets(p)) out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::string> output_bit_nets(const Netlist& n) {
  std::vector<std::string> out;
  for (const auto& p : n.outputs) {
    for (auto& s : port_nets(p)) out.push_back(std::move(s));
  }
  return out;
}

const Port* find_input(const Netlist& n, std::string_view name) {
  for (const auto& p : n.inputs) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

const Port* find_output(const Netlist& n, std::string_view name) {
  for (const auto& p : n.outputs) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

int key_width(const Netlist& n) {
  const Port* k = find_input(n, kKeyPort);
  return k == nullptr ? 0 : k->width;
}

bool has_dff(const Netlist& n) {
  return std::any_of(n.cells.begin(), n.cells.end(),
                     [](const Cell& c) { return c.kind == CellKind::Dff; });
}

std::vector<std::size_t> topo_order(const Netlist& n) {
  std::unordered_map<std::string, std::size_t> driver;
  for (std::size_t i = 0; i < n.cells.size(); ++i) driver[n.cells[i].output()] = i;

  std::vector<std::vector<std::size_t>> fanout(n.cells.size());
  std::vector<int> indeg(n.cells.size(), 0);
  for (std::size_t i = 0; i < n.cells.size(); ++i) {
    const Cell& c = n.cells[i];
    if (c.kind == CellKind::Dff) continue;  // sequential boundary
    for (auto pin : input_pins(c.kind)) {
      auto it = driver.find(c.pin(pin));
      if (it != driver.end() && n.cells[it->second].kind != CellKind::Dff) {
        fanout[it->second].push_back(i);
        ++indeg[i];
      }
    }
  }
  using Item = std::pair<std::string_view, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> ready;
  for (std::size_t i = 0; i < n.cells.size(); ++i) {
    if (indeg[i] == 0) ready.emplace(n.cells[i].id, i);
  }
  std::vector<std::size_t> order;
  order.reserve(n.cells.size());
  while (!ready.empty()) {
    const auto [id, i] = ready.top();
    ready.pop();
    order.push_back(i);
    for (auto j : fanout[i]) {
      if (--indeg[j] == 0) ready.emplace(n.cells[j].id, j);
    }
  }
  if (order.size() != n.cells.size()) {
    for (std::size_t i = 0; i < n.cells.size(); ++i) {
      if (indeg[i] > 0) {
        throw Error(ErrorCode::CombLoopError, "combinational loop through cell " + n.cells[i].id);
      }
    }
  }
  return order;
}

void check(const Netlist& n) {
  std::set<std::string> nets;
  for (const auto& net : n.nets) {
    if (!nets.insert(net).second) throw Error(ErrorCode::SchemaError, "duplicate net " + net);
  }
  std::map<std::string, std::string> driver;  // net -> driver description
  auto drive = [&](const std::string& net, const std::string& who) {
    if (!nets.count(net)) throw Error(ErrorCode::SchemaError, who + " drives undeclared net " + net);
    auto [it, inserted] = driver.emplace(net, who);
    if (!inserted) {
      throw Error(ErrorCode::MultiDriverError, "net " + net + " driven by " + it->second + " and " + who);
    }
  };
  std::set<std::string> port_names;
  for (const auto* ports : {&n.inputs, &n.outputs}) {
    for (const auto& p : *ports) {
      if (p.width < 1) throw Error(ErrorCode::SchemaError, "port " + p.name + " has width < 1");
      if (!port_names.insert(p.name).second) {
        throw Error(ErrorCode::SchemaError, "duplicate port " + p.name);
      }
    }
  }
  for (const auto& p : n.inputs) {
    for (const auto& net : port_nets(p)) drive(net, "input " + p.name);
  }
  std::set<std::string> ids;
  for (const auto& c : n.cells) {
    if (!ids.insert(c.id).second) throw Error(ErrorCode::SchemaError, "duplicate cell id " + c.id);
    const auto ins = input_pins(c.kind);
    if (c.pins.size() != ins.size() + 1) {
      throw Error(ErrorCode::SchemaError, "cell " + c.id + " has incomplete or extra pins");
    }
    for (auto pin : ins) {
      const auto& net = c.pin(pin);
      if (!nets.count(net)) throw Error(ErrorCode::SchemaError, "cell " + c.id + " reads undeclared net " + net);
    }
    drive(c.output(), "cell " + c.id);
  }
  for (const auto& c : n.cells) {
    for (auto pin : input_pins(c.kind)) {
      if (!driver.count(c.pin(pin))) {
        throw Error(ErrorCode::SchemaError, "cell " + c.id + " reads undriven net " + c.pin(pin));
      }
    }
  }
  for (const auto& p : n.outputs) {
    for (const auto& net : port_nets(p)) {
      if (!nets.count(net)) throw Error(ErrorCode::SchemaError, "output net " + net + " undeclared");
      if (!driver.count(net)) throw Error(ErrorCode::SchemaError, "output net " + net + " undriven");
    }
  }
  topo_order(n);
}

Netlist canonical(Netlist n) {
  std::sort(n.nets.begin(), n.nets.end());
  std::sort(n.cells.begin(), n.cells.end(), [](const Cell& a, const Cell& b) { return a.id < b.id; });
  return n;
}

std::string serialize(const Netlist& raw) {
  using detail::json;
  const Netlist n = canonical(raw);
  auto ports = [](const std::vector<Port>& ps) {
    json arr = json::array();
    for (const auto& p : ps) arr.push_back({{"name", p.name}, {"width", p.width}});
    return arr;
  };
  json cells = json::array();
  for (const auto& c : n.cells) {
    json pins = json::object();
    for (const auto& [k, v] : c.pins) pins[k] = v;
    cells.push_back({{"id", c.id}, {"kind", std::string(to_string(c.kind))}, {"pins", pins}});
  }
  json j{{"name", n.name},
         {"inputs", ports(n.inputs)},
         {"outputs", ports(n.outputs)},
         {"nets", n.nets},
         {"cells", cells}};
  return detail::dump(j);
}

Netlist parse_netlist(std::string_view text) {
  using detail::get_field;
  using detail::json;
  const json j = detail::parse_json(text, "netlist");
  Netlist n;
  n.name = get_field<std::string>(j, "name", "netlist");
  auto ports = [](const json& arr, std::vector<Port>& out) {
    if (!arr.is_array()) throw Error(ErrorCode::SchemaError, "ports must be an array");
    for (const auto& p : arr) {
      out.push_back(Port{get_field<std::string>(p, "name", "port"), get_field<int>(p, "width", "port")});
    }
  };
  ports(get_field<json>(j, "inputs", "netlist"), n.inputs);
  ports(get_field<json>(j, "outputs", "netlist"), n.outputs);
  n.nets = get_field<std::vector<std::string>>(j, "nets", "netlist");
  const json cells = get_field<json>(j, "cells", "netlist");
  if (!cells.is_array()) throw Error(ErrorCode::SchemaError, "cells must be an array");
  for (const auto& c : cells) {
    Cell cell;
    cell.id = get_field<std::string>(c, "id", "cell");
    const auto kind = get_field<std::string>(c, "kind", "cell");
    auto k = cell_kind_from_string(kind);
    if (!k) throw Error(ErrorCode::SchemaError, "unknown cell kind " + kind);
    cell.kind = *k;
    cell.pins = get_field<std::map<std::string, std::string>>(c, "pins", "cell");
    n.cells.push_back(std::move(cell));
  }
  n = canonical(std::move(n));
  check(n);
  return n;
}

Netlist bind_key(const Netlist& n, const BitString& key) {
  const Port* kp = find_input(n, kKeyPort);
  if (kp == nullptr) {
    if (!key.empty()) throw Error(ErrorCode::KeyLengthMismatch, "netlist has no key port");
    return n;
  }
  if (static_cast<std::size_t>(kp->width) != key.size()) {
    throw Error(ErrorCode::KeyLengthMismatch, "key has " + std::to_string(key.size()) +
                                                  " bits, netlist expects " + std::to_string(kp->width));
  }
  const auto key_nets = port_nets(*kp);
  NetlistBuilder b(n);
  auto& out = b.netlist();
  out.inputs.erase(std::remove_if(out.inputs.begin(), out.inputs.end(),
                                  [](const Port& p) { return p.name == kKeyPort; }),
                   out.inputs.end());
  for (std::size_t i = 0; i < key_nets.size(); ++i) {
    if (key[i]) {
      b.const1(key_nets[i]);
    } else {
      b.const0(key_nets[i]);
    }
  }
  return std::move(b).build();
}

Netlist combinational_frame(const Netlist& n) {
  Netlist out = n;
  out.cells.clear();
  for (const auto& c : n.cells) {
    if (c.kind != CellKind::Dff) {
      out.cells.push_back(c);
      continue;
    }
    Port q{c.id + ".q", 1};
    Port d{c.id + ".d", 1};
    // The q net keeps its name; it is now driven by the pseudo-input port,
    // so a BUF carries it from the port-named net.
    out.inputs.push_back(q);
    out.outputs.push_back(d);
    out.nets.push_back(q.name);
    out.nets.push_back(d.name);
    out.cells.push_back(Cell{c.id + ".qbuf", CellKind::Buf, {{"a", q.name}, {"y", c.pin("q")}}});
    out.cells.push_back(Cell{c.id + ".dbuf", CellKind::Buf, {{"a", c.pin("d")}, {"y", d.name}}});
  }
  out = canonical(std::move(out));
  check(out);
  return out;
}

Netlist drop_outputs(const Netlist& n, const std::set<std::string>& names) {
  Netlist out = n;
  out.outputs.erase(std::remove_if(out.outputs.begin(), out.outputs.end(),
                                   [&](const Port& p) { return names.count(p.name) != 0; }),
                    out.outputs.end());
  return out;
}

NetlistBuilder::NetlistBuilder(std::string name) { n_.name = std::move(name); }

NetlistBuilder::NetlistBuilder(Netlist base) : n_(std::move(base)) {
  net_set_.insert(n_.nets.begin(), n_.nets.end());
  for (const auto& c : n_.cells) cell_ids_.insert(c.id);
}

void NetlistBuilder::declare(const std::string& net) {
  if (net_set_.insert(net).second) n_.nets.push_back(net);
}

std::vector<std::string> NetlistBuilder::add_input(const std::string& name, int width) {
  Port p{name, width};
  n_.inputs.push_back(p);
  auto nets = port_nets(p);
  for (const auto& net : nets) declare(net);
  return nets;
}

std::vector<std::string> NetlistBuilder::add_output(const std::string& name, int width) {
  Port p{name, width};
  n_.outputs.push_back(p);
  auto nets = port_nets(p);
  for (const auto& net : nets) declare(net);
  return nets;
}

std::string NetlistBuilder::fresh_net(std::string_view hint) {
  std::string name;
  do {
    name = std::string(hint) + "$" + std::to_string(counter_++);
  } while (net_set_.count(name));
  declare(name);
  return name;
}

std::string NetlistBuilder::fresh_cell_id(std::string_view hint) {
  std::string id;
  do {
    id = std::string(hint) + "$" + std::to_string(counter_++);
  } while (cell_ids_.count(id));
  cell_ids_.insert(id);
  return id;
}

std::string NetlistBuilder::add_cell(CellKind kind, std::span<const std::string> inputs, std::string out,
                                     std::string_view id_hint) {
  const auto pins = input_pins(kind);
  if (pins.size() != inputs.size()) {
    throw std::invalid_argument("add_cell: wrong operand count for " + std::string(to_string(kind)));
  }
  if (out.empty()) {
    out = fresh_net("n");
  } else {
    declare(out);
  }
  Cell c;
  c.id = fresh_cell_id(id_hint);
  c.kind = kind;
  for (std::size_t i = 0; i < pins.size(); ++i) c.pins[std::string(pins[i])] = inputs[i];
  c.pins[std::string(output_pin(kind))] = out;
  n_.cells.push_back(std::move(c));
  return out;
}

std::string NetlistBuilder::and_(const std::string& a, const std::string& b, std::string out) {
  const std::string ins[] = {a, b};
  return add_cell(CellKind::And, ins, std::move(out), "and");
}
std::string NetlistBuilder::or_(const std::string& a, const std::string& b, std::string out) {
  const std::string ins[] = {a, b};
  return add_cell(CellKind::Or, ins, std::move(out), "or");
}
std::string NetlistBuilder::xor_(const std::string& a, const std::string& b, std::string out) {
  const std::string ins[] = {a, b};
  return add_cell(CellKind::Xor, ins, std::move(out), "xor");
}
std::string NetlistBuilder::not_(const std::string& a, std::string out) {
  const std::string ins[] = {a};
  return add_cell(CellKind::Not, ins, std::move(out), "not");
}
std::string NetlistBuilder::buf(const std::string& a, std::string out) {
  const std::string ins[] = {a};
  return add_cell(CellKind::Buf, ins, std::move(out), "buf");
}
std::string NetlistBuilder::mux(const std::string& a, const std::string& b, const std::string& sel,
                                std::string out) {
  const std::string ins[] = {a, b, sel};
  return add_cell(CellKind::Mux2, ins, std::move(out), "mux");
}
std::string NetlistBuilder::const0(std::string out) {
  return add_cell(CellKind::Const0, {}, std::move(out), "const0");
}
std::string NetlistBuilder::const1(std::string out) {
  return add_cell(CellKind::Const1, {}, std::move(out), "const1");
}
std::string NetlistBuilder::dff(const std::string& d, const std::string& clk, std::string out) {
  const std::string ins[] = {d, clk};
  return add_cell(CellKind::Dff, ins, std::move(out), "dff");
}

Netlist NetlistBuilder::build() && {
  Netlist out = canonical(std::move(n_));
  check(out);
  return out;
}

}  // namespace topoveil
