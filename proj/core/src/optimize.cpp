#include "topoveil/optimize.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "topoveil/error.hpp"

namespace topoveil {

namespace {

constexpr const char* kConstNet[2] = {"$const0", "$const1"};

class Pass {
 public:
  explicit Pass(const Netlist& n) : n_(n) {
    for (const auto& net : output_bit_nets(n)) po_.insert(net);
  }

  Netlist run() {
    for (std::size_t idx : topo_order(n_)) visit(n_.cells[idx]);
    // DFFs are sources in the order above, so their d pins may have been
    // aliased after they were visited.
    for (auto& c : out_) {
      for (auto& [pin, net] : c.pins) {
        if (pin != output_pin(c.kind)) net = resolve(net);
      }
    }
    for (int v = 0; v < 2; ++v) {
      if (need_const_[v]) {
        Cell c{kConstNet[v], v ? CellKind::Const1 : CellKind::Const0, {{"y", kConstNet[v]}}};
        out_.push_back(std::move(c));
      }
    }
    return sweep();
  }

 private:
  std::string resolve(const std::string& net) const {
    std::string cur = net;
    for (auto it = alias_.find(cur); it != alias_.end(); it = alias_.find(cur)) cur = it->second;
    return cur;
  }

  std::optional<bool> const_of(const std::string& net) const {
    auto it = consts_.find(net);
    if (it == consts_.end()) return std::nullopt;
    return it->second;
  }

  void keep(Cell c) {
    const std::string& y = c.output();
    if (c.kind == CellKind::Const0 || c.kind == CellKind::Const1) consts_[y] = c.kind == CellKind::Const1;
    if (c.kind != CellKind::Dff) {
      std::string key(to_string(c.kind));
      std::vector<std::string> ins;
      for (auto pin : input_pins(c.kind)) ins.push_back(c.pin(pin));
      if (is_commutative(c.kind)) std::sort(ins.begin(), ins.end());
      for (const auto& i : ins) key += "|" + i;
      if (c.kind == CellKind::Const0 || c.kind == CellKind::Const1) key += "|" + y;  // never merged here
      auto [it, fresh] = hashed_.emplace(key, y);
      if (!fresh) {
        redirect(c, it->second);
        return;
      }
    }
    out_.push_back(std::move(c));
  }

  void to_const(const Cell& c, bool v) {
    const std::string& y = c.output();
    if (po_.count(y)) {
      Cell k{c.id, v ? CellKind::Const1 : CellKind::Const0, {{"y", y}}};
      consts_[y] = v;
      out_.push_back(std::move(k));
      return;
    }
    need_const_[v] = true;
    consts_[kConstNet[v]] = v;
    if (y != kConstNet[v]) alias_[y] = kConstNet[v];
  }

  void redirect(const Cell& c, const std::string& net) {
    if (auto v = const_of(net)) {
      to_const(c, *v);
      return;
    }
    const std::string& y = c.output();
    if (po_.count(y)) {
      out_.push_back(Cell{c.id, CellKind::Buf, {{"a", net}, {"y", y}}});
      return;
    }
    alias_[y] = net;
  }

  void invert(const Cell& c, const std::string& net) {
    if (auto v = const_of(net)) {
      to_const(c, !*v);
      return;
    }
    if (auto it = not_of_.find(net); it != not_of_.end()) {
      redirect(c, it->second);
      return;
    }
    Cell k{c.id, CellKind::Not, {{"a", net}, {"y", c.output()}}};
    not_of_.emplace(c.output(), net);
    keep(std::move(k));
  }

  void visit(const Cell& orig) {
    Cell c = orig;
    for (auto& [pin, net] : c.pins) {
      if (pin != output_pin(c.kind)) net = resolve(net);
    }
    const std::string& y = c.output();
    switch (c.kind) {
      case CellKind::Const0:
      case CellKind::Const1: {
        const bool v = c.kind == CellKind::Const1;
        if (po_.count(y)) {
          keep(std::move(c));
        } else {
          to_const(c, v);
        }
        return;
      }
      case CellKind::Buf:
        if (po_.count(y) && !const_of(c.pin("a"))) {
          keep(std::move(c));
        } else {
          redirect(c, c.pin("a"));
        }
        return;
      case CellKind::Not:
        invert(c, c.pin("a"));
        return;
      case CellKind::And:
      case CellKind::Or: {
        const bool absorbing = c.kind == CellKind::Or;  // OR absorbs 1, AND absorbs 0
        const std::string a = c.pin("a"), b = c.pin("b");
        const auto ca = const_of(a), cb = const_of(b);
        if ((ca && *ca == absorbing) || (cb && *cb == absorbing)) return to_const(c, absorbing);
        if (ca) return redirect(c, b);
        if (cb) return redirect(c, a);
        if (a == b) return redirect(c, a);
        return keep(std::move(c));
      }
      case CellKind::Xor: {
        const std::string a = c.pin("a"), b = c.pin("b");
        const auto ca = const_of(a), cb = const_of(b);
        if (ca && cb) return to_const(c, *ca != *cb);
        if (a == b) return to_const(c, false);
        if (ca) return *ca ? invert(c, b) : redirect(c, b);
        if (cb) return *cb ? invert(c, a) : redirect(c, a);
        return keep(std::move(c));
      }
      case CellKind::Mux2: {
        const std::string a = c.pin("a"), b = c.pin("b"), s = c.pin("sel");
        if (auto cs = const_of(s)) return redirect(c, *cs ? b : a);
        if (a == b) return redirect(c, a);
        const auto ca = const_of(a), cb = const_of(b);
        if (ca && cb && *ca == *cb) return to_const(c, *ca);
        if (ca && cb) return *cb ? redirect(c, s) : invert(c, s);
        return keep(std::move(c));
      }
      case CellKind::Dff:
        out_.push_back(std::move(c));
        return;
    }
  }

  /// Drops cells that reach neither an output port nor a DFF, then nets that
  /// nothing references.
  Netlist sweep() const {
    std::unordered_map<std::string, std::size_t> driver;
    for (std::size_t i = 0; i < out_.size(); ++i) driver[out_[i].output()] = i;
    std::vector<char> live(out_.size(), 0);
    std::vector<std::string> stack(po_.begin(), po_.end());
    for (std::size_t i = 0; i < out_.size(); ++i) {
      if (out_[i].kind == CellKind::Dff) {
        live[i] = 1;
        for (auto pin : input_pins(CellKind::Dff)) stack.push_back(out_[i].pin(pin));
      }
    }
    while (!stack.empty()) {
      const std::string net = std::move(stack.back());
      stack.pop_back();
      auto it = driver.find(net);
      if (it == driver.end() || live[it->second]) continue;
      live[it->second] = 1;
      const Cell& c = out_[it->second];
      for (auto pin : input_pins(c.kind)) stack.push_back(c.pin(pin));
    }

    Netlist r;
    r.name = n_.name;
    r.inputs = n_.inputs;
    r.outputs = n_.outputs;
    std::set<std::string> used;
    for (const auto& net : input_bit_nets(n_)) used.insert(net);
    for (const auto& net : output_bit_nets(n_)) used.insert(net);
    for (std::size_t i = 0; i < out_.size(); ++i) {
      if (!live[i]) continue;
      for (const auto& [pin, net] : out_[i].pins) used.insert(net);
      r.cells.push_back(out_[i]);
    }
    r.nets.assign(used.begin(), used.end());
    return canonical(std::move(r));
  }

  const Netlist& n_;
  std::unordered_set<std::string> po_;
  std::unordered_map<std::string, std::string> alias_;
  std::unordered_map<std::string, bool> consts_;
  std::unordered_map<std::string, std::string> hashed_;
  std::unordered_map<std::string, std::string> not_of_;  // NOT output -> its input
  bool need_const_[2] = {false, false};
  std::vector<Cell> out_;
};

}  // namespace

Netlist synthesize_lite(const Netlist& n) {
  check(n);
  Netlist cur = canonical(n);
  for (;;) {
    Netlist next = Pass(cur).run();
    if (next == cur) return next;
    cur = std::move(next);
  }
}

}  // namespace topoveil
