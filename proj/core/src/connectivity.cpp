#include "topoveil/connectivity.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "topoveil/error.hpp"

namespace topoveil {

SignalGrouping grouping_from_ports(const Netlist& n, NodeId router, bool live_only) {
  std::unordered_set<std::string> read, live_driven;
  for (const auto& c : n.cells) {
    for (auto pin : input_pins(c.kind)) read.insert(c.pin(pin));
    if (c.kind != CellKind::Const0 && c.kind != CellKind::Const1) live_driven.insert(c.output());
  }
  auto any_in = [](const std::vector<std::string>& nets, const std::unordered_set<std::string>& s) {
    return std::any_of(nets.begin(), nets.end(), [&](const auto& x) { return s.count(x) != 0; });
  };
  SignalGrouping g;
  g.router = std::move(router);
  for (const auto& p : n.inputs) {
    auto nets = port_nets(p);
    if (p.name != kKeyPort && (!live_only || any_in(nets, read))) g.inputs[p.name] = std::move(nets);
  }
  for (const auto& p : n.outputs) {
    auto nets = port_nets(p);
    if (!live_only || any_in(nets, live_driven)) g.outputs[p.name] = std::move(nets);
  }
  return g;
}

ConnectivityMatrix::ConnectivityMatrix(NodeId router, std::vector<std::string> rows, std::vector<std::string> cols)
    : router_(std::move(router)), rows_(std::move(rows)), cols_(std::move(cols)),
      cells_(rows_.size() * cols_.size(), 0) {}

std::optional<std::size_t> ConnectivityMatrix::row_index(std::string_view name) const {
  auto it = std::find(rows_.begin(), rows_.end(), name);
  if (it == rows_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - rows_.begin());
}

std::optional<std::size_t> ConnectivityMatrix::col_index(std::string_view name) const {
  auto it = std::find(cols_.begin(), cols_.end(), name);
  if (it == cols_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - cols_.begin());
}

bool ConnectivityMatrix::get(std::string_view row, std::string_view col) const {
  const auto r = row_index(row);
  const auto c = col_index(col);
  return r && c && at(*r, *c);
}

bool ConnectivityMatrix::row_any(std::size_t r) const {
  for (std::size_t c = 0; c < cols_.size(); ++c) {
    if (at(r, c)) return true;
  }
  return false;
}

ConnectivityMatrix extract_connectivity(const Netlist& n, const SignalGrouping& g) {
  std::unordered_set<std::string> declared(n.nets.begin(), n.nets.end());
  auto require = [&](const auto& signals) {
    for (const auto& [name, nets] : signals) {
      for (const auto& net : nets) {
        if (!declared.count(net)) throw Error(ErrorCode::UnknownSignal, name + " (" + net + ")");
      }
    }
  };
  require(g.inputs);
  require(g.outputs);

  // net -> outputs of combinational cells reading it
  std::unordered_map<std::string, std::vector<const std::string*>> fanout;
  for (const auto& c : n.cells) {
    if (c.kind == CellKind::Dff) continue;
    for (auto pin : input_pins(c.kind)) fanout[c.pin(pin)].push_back(&c.output());
  }

  std::vector<std::string> rows, cols;
  for (const auto& [name, nets] : g.inputs) rows.push_back(name);
  for (const auto& [name, nets] : g.outputs) cols.push_back(name);
  ConnectivityMatrix m(g.router, rows, cols);

  std::size_t r = 0;
  for (const auto& [name, nets] : g.inputs) {
    std::unordered_set<std::string> seen(nets.begin(), nets.end());
    std::vector<std::string> stack(nets.begin(), nets.end());
    while (!stack.empty()) {
      const std::string net = std::move(stack.back());
      stack.pop_back();
      auto it = fanout.find(net);
      if (it == fanout.end()) continue;
      for (const std::string* y : it->second) {
        if (seen.insert(*y).second) stack.push_back(*y);
      }
    }
    std::size_t c = 0;
    for (const auto& [out, onets] : g.outputs) {
      m.set(r, c++, std::any_of(onets.begin(), onets.end(), [&](const auto& x) { return seen.count(x) != 0; }));
    }
    ++r;
  }
  return m;
}

ConnectivityMatrix merge_connectivity(const ConnectivityMatrix& pre, const ConnectivityMatrix& post) {
  if (pre.router() != post.router()) {
    throw Error(ErrorCode::RouterMismatch, "'" + pre.router() + "' vs '" + post.router() + "'");
  }
  auto unite = [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::set<std::string> s(a.begin(), a.end());
    s.insert(b.begin(), b.end());
    return std::vector<std::string>(s.begin(), s.end());
  };
  ConnectivityMatrix m(pre.router(), unite(pre.rows(), post.rows()), unite(pre.cols(), post.cols()));
  for (std::size_t r = 0; r < m.rows().size(); ++r) {
    for (std::size_t c = 0; c < m.cols().size(); ++c) {
      m.set(r, c, pre.get(m.rows()[r], m.cols()[c]) && post.get(m.rows()[r], m.cols()[c]));
    }
  }
  return m;
}

std::string to_csv(const ConnectivityMatrix& m) {
  std::ostringstream os;
  for (const auto& c : m.cols()) os << ',' << c;
  os << '\n';
  for (std::size_t r = 0; r < m.rows().size(); ++r) {
    os << m.rows()[r];
    for (std::size_t c = 0; c < m.cols().size(); ++c) os << ',' << (m.at(r, c) ? 1 : 0);
    os << '\n';
  }
  return os.str();
}

ConnectivityMatrix matrix_from_csv(std::string_view text, NodeId router) {
  std::istringstream is{std::string(text)};
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ls(s);
    while (std::getline(ls, cur, ',')) out.push_back(cur);
    if (!s.empty() && s.back() == ',') out.emplace_back();
    return out;
  };
  if (!std::getline(is, line)) throw Error(ErrorCode::ParseError, "connectivity CSV: empty");
  auto header = split(line);
  if (header.empty() || !header[0].empty()) throw Error(ErrorCode::ParseError, "connectivity CSV: bad header");
  std::vector<std::string> cols(header.begin() + 1, header.end());
  std::vector<std::string> rows;
  std::vector<std::vector<bool>> vals;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto f = split(line);
    if (f.size() != cols.size() + 1) throw Error(ErrorCode::ParseError, "connectivity CSV: ragged row " + f[0]);
    rows.push_back(f[0]);
    std::vector<bool> row;
    for (std::size_t i = 1; i < f.size(); ++i) {
      if (f[i] != "0" && f[i] != "1") throw Error(ErrorCode::ParseError, "connectivity CSV: entry " + f[i]);
      row.push_back(f[i] == "1");
    }
    vals.push_back(std::move(row));
  }
  ConnectivityMatrix m(std::move(router), rows, cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) m.set(r, c, vals[r][c]);
  }
  return m;
}

}  // namespace topoveil
