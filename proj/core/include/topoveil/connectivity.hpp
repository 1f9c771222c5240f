#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "topoveil/netlist.hpp"
#include "topoveil/topology.hpp"

namespace topoveil {

/// Router signal interface: named input and output signals, each a set of
/// nets (one per bus bit).
struct SignalGrouping {
  NodeId router;
  std::map<std::string, std::vector<std::string>> inputs;
  std::map<std::string, std::vector<std::string>> outputs;
};

/// One signal per port; the key port is skipped. With live_only, an input
/// survives only if some cell reads it and an output only if some bit is
/// driven by non-constant logic: the signals still present after synthesis.
SignalGrouping grouping_from_ports(const Netlist& n, NodeId router, bool live_only = false);

class ConnectivityMatrix {
 public:
  ConnectivityMatrix() = default;
  ConnectivityMatrix(NodeId router, std::vector<std::string> rows, std::vector<std::string> cols);

  const NodeId& router() const noexcept { return router_; }
  const std::vector<std::string>& rows() const noexcept { return rows_; }
  const std::vector<std::string>& cols() const noexcept { return cols_; }

  bool at(std::size_t r, std::size_t c) const { return cells_[r * cols_.size() + c] != 0; }
  void set(std::size_t r, std::size_t c, bool v) { cells_[r * cols_.size() + c] = v ? 1 : 0; }
  /// False when either name is absent.
  bool get(std::string_view row, std::string_view col) const;

  std::optional<std::size_t> row_index(std::string_view name) const;
  std::optional<std::size_t> col_index(std::string_view name) const;
  bool row_any(std::size_t r) const;

  bool operator==(const ConnectivityMatrix&) const = default;

 private:
  NodeId router_;
  std::vector<std::string> rows_;
  std::vector<std::string> cols_;
  std::vector<std::uint8_t> cells_;
};

/// Entry (i, j) is true iff a combinational path runs from any net of input
/// signal i to any net of output signal j. DFFs end paths. Throws
/// UnknownSignal for nets missing from `n`.
ConnectivityMatrix extract_connectivity(const Netlist& n, const SignalGrouping& g);

/// Cellwise AND over the sorted union of row and column names; names missing
/// from either side read as false. Throws RouterMismatch.
ConnectivityMatrix merge_connectivity(const ConnectivityMatrix& pre, const ConnectivityMatrix& post);

/// Header ",col1,col2,..." then one "row,0,1,..." line per input signal.
std::string to_csv(const ConnectivityMatrix& m);
ConnectivityMatrix matrix_from_csv(std::string_view text, NodeId router = {});

}  // namespace topoveil
