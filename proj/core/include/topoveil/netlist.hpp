#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "topoveil/bitstring.hpp"

namespace topoveil {

enum class CellKind { And, Or, Not, Xor, Mux2, Const0, Const1, Dff, Buf };

std::string_view to_string(CellKind k);
std::optional<CellKind> cell_kind_from_string(std::string_view s);

/// Input pin names in evaluation order. MUX2 is y = sel ? b : a.
std::span<const std::string_view> input_pins(CellKind k);
/// "y" for combinational cells, "q" for DFF.
std::string_view output_pin(CellKind k);
bool is_commutative(CellKind k);

struct Port {
  std::string name;
  int width = 1;
  bool operator==(const Port&) const = default;
};

struct Cell {
  std::string id;
  CellKind kind = CellKind::Buf;
  std::map<std::string, std::string> pins;

  const std::string& pin(std::string_view name) const;
  const std::string& output() const { return pin(output_pin(kind)); }
  bool operator==(const Cell&) const = default;
};

/// Flat single-bit structural netlist. A port of width 1 is carried by the
/// net of the same name; wider ports by nets "name[0]".."name[w-1]".
struct Netlist {
  std::string name;
  std::vector<Port> inputs;
  std::vector<Port> outputs;
  std::vector<std::string> nets;
  std::vector<Cell> cells;

  bool operator==(const Netlist&) const = default;
};

/// Name of the input port holding key bits, bit 0 first.
inline constexpr std::string_view kKeyPort = "key";

std::string port_bit_net(const Port& p, int bit);
std::vector<std::string> port_nets(const Port& p);
std::vector<std::string> input_bit_nets(const Netlist& n);
std::vector<std::string> output_bit_nets(const Netlist& n);
const Port* find_input(const Netlist& n, std::string_view name);
const Port* find_output(const Netlist& n, std::string_view name);
int key_width(const Netlist& n);
bool has_dff(const Netlist& n);

/// Verifies pins, single drivers, driven reads and acyclicity. Throws
/// SchemaError, MultiDriverError or CombLoopError.
void check(const Netlist& n);

/// Cell indices in topological order (DFFs act as sources). Ties are broken
/// by cell id so the order is deterministic. Throws CombLoopError.
std::vector<std::size_t> topo_order(const Netlist& n);

/// Sorted nets and cells; the form used by serialize and by equality checks.
Netlist canonical(Netlist n);

std::string serialize(const Netlist& n);
Netlist parse_netlist(std::string_view json_text);

/// Replaces the key port by constant drivers for `key`. The result has the
/// same non-key interface.
Netlist bind_key(const Netlist& n, const BitString& key);

/// Replaces each DFF by a pseudo-input "<id>.q" port and a pseudo-output
/// "<id>.d" port: the combinational frame.
Netlist combinational_frame(const Netlist& n);

/// Demotes the named output ports to internal nets.
Netlist drop_outputs(const Netlist& n, const std::set<std::string>& names);

/// Incremental construction with fresh-name allocation.
class NetlistBuilder {
 public:
  explicit NetlistBuilder(std::string name);
  explicit NetlistBuilder(Netlist base);

  std::vector<std::string> add_input(const std::string& name, int width = 1);
  std::vector<std::string> add_output(const std::string& name, int width = 1);

  /// Declares a fresh net whose name starts with `hint`.
  std::string fresh_net(std::string_view hint = "n");
  std::string fresh_cell_id(std::string_view hint = "c");
  bool has_net(const std::string& net) const { return net_set_.count(net) != 0; }

  /// Adds a cell driving `out` (declared if absent), or a fresh net when
  /// `out` is empty. Returns the output net.
  std::string add_cell(CellKind kind, std::span<const std::string> inputs, std::string out = {},
                       std::string_view id_hint = "c");

  std::string and_(const std::string& a, const std::string& b, std::string out = {});
  std::string or_(const std::string& a, const std::string& b, std::string out = {});
  std::string xor_(const std::string& a, const std::string& b, std::string out = {});
  std::string not_(const std::string& a, std::string out = {});
  std::string buf(const std::string& a, std::string out = {});
  std::string mux(const std::string& a, const std::string& b, const std::string& sel,
                  std::string out = {});
  std::string const0(std::string out = {});
  std::string const1(std::string out = {});
  std::string dff(const std::string& d, const std::string& clk, std::string out = {});

  Netlist& netlist() { return n_; }
  /// Finalizes: canonical form, then check().
  Netlist build() &&;

 private:
  void declare(const std::string& net);

  Netlist n_;
  std::set<std::string> net_set_;
  std::set<std::string> cell_ids_;
  std::size_t counter_ = 0;
};

}  // namespace topoveil
