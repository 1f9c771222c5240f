#include "topoveil/simulate.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include "topoveil/error.hpp"
#include "topoveil/prng.hpp"

namespace topoveil {

Simulator::Simulator(const Netlist& n) {
  std::unordered_map<std::string, std::uint32_t> index;
  auto id_of = [&](const std::string& net) {
    auto [it, inserted] = index.emplace(net, static_cast<std::uint32_t>(index.size()));
    return it->second;
  };
  for (const auto& net : input_bit_nets(n)) {
    inputs_.push_back(id_of(net));
    input_names_.push_back(net);
  }
  std::vector<const Cell*> dffs;
  for (const auto& c : n.cells) {
    if (c.kind == CellKind::Dff) dffs.push_back(&c);
  }
  std::sort(dffs.begin(), dffs.end(), [](const Cell* a, const Cell* b) { return a->id < b->id; });
  for (const Cell* d : dffs) {
    inputs_.push_back(id_of(d->pin("q")));
    input_names_.push_back(d->pin("q"));
  }
  for (auto i : topo_order(n)) {
    const Cell& c = n.cells[i];
    if (c.kind == CellKind::Dff) continue;
    Op op{c.kind};
    const auto pins = input_pins(c.kind);
    if (!pins.empty()) op.a = id_of(c.pin(pins[0]));
    if (pins.size() > 1) op.b = id_of(c.pin(pins[1]));
    if (pins.size() > 2) op.s = id_of(c.pin(pins[2]));
    op.y = id_of(c.output());
    ops_.push_back(op);
  }
  for (const auto& net : output_bit_nets(n)) {
    outputs_.push_back(id_of(net));
    output_names_.push_back(net);
  }
  for (const Cell* d : dffs) {
    outputs_.push_back(id_of(d->pin("d")));
    output_names_.push_back(d->pin("d"));
  }
  net_count_ = index.size();
}

void Simulator::eval(std::span<const std::uint64_t> in, std::span<std::uint64_t> out) const {
  if (in.size() != inputs_.size() || out.size() != outputs_.size()) {
    throw std::invalid_argument("Simulator::eval: interface size mismatch");
  }
  std::vector<std::uint64_t> v(net_count_, 0);
  for (std::size_t i = 0; i < inputs_.size(); ++i) v[inputs_[i]] = in[i];
  for (const Op& op : ops_) {
    switch (op.kind) {
      case CellKind::And: v[op.y] = v[op.a] & v[op.b]; break;
      case CellKind::Or: v[op.y] = v[op.a] | v[op.b]; break;
      case CellKind::Xor: v[op.y] = v[op.a] ^ v[op.b]; break;
      case CellKind::Not: v[op.y] = ~v[op.a]; break;
      case CellKind::Buf: v[op.y] = v[op.a]; break;
      case CellKind::Mux2: v[op.y] = (v[op.a] & ~v[op.s]) | (v[op.b] & v[op.s]); break;
      case CellKind::Const0: v[op.y] = 0; break;
      case CellKind::Const1: v[op.y] = ~std::uint64_t{0}; break;
      case CellKind::Dff: break;
    }
  }
  for (std::size_t i = 0; i < outputs_.size(); ++i) out[i] = v[outputs_[i]];
}

BitString Simulator::eval(const BitString& in) const {
  if (in.size() != inputs_.size()) throw std::invalid_argument("Simulator::eval: input width mismatch");
  std::vector<std::uint64_t> words(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) words[i] = in[i] ? 1 : 0;
  std::vector<std::uint64_t> out(outputs_.size());
  eval(words, out);
  BitString result(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) result.set(i, (out[i] & 1) != 0);
  return result;
}

void exhaustive_patterns(std::uint64_t base, std::span<std::uint64_t> words) {
  for (std::size_t i = 0; i < words.size(); ++i) {
    std::uint64_t w = 0;
    for (std::uint64_t p = 0; p < 64; ++p) {
      const std::uint64_t index = base + p;
      if (i < 64 && ((index >> i) & 1U)) w |= std::uint64_t{1} << p;
    }
    words[i] = w;
  }
}

EquivalenceResult check_equivalence(const Netlist& a, const Netlist& b, const EquivalenceOptions& opts) {
  const Simulator sa(a);
  const Simulator sb(b);
  if (sa.input_nets() != sb.input_nets() || sa.output_nets() != sb.output_nets()) {
    throw Error(ErrorCode::OracleMismatch, "netlists " + a.name + " and " + b.name +
                                               " have different interfaces");
  }
  EquivalenceResult r;
  const std::size_t ni = sa.input_count();
  std::vector<std::uint64_t> in(ni), oa(sa.output_count()), ob(sb.output_count());

  auto compare = [&](std::uint64_t valid_mask) -> bool {
    sa.eval(in, oa);
    sb.eval(in, ob);
    std::uint64_t diff = 0;
    for (std::size_t i = 0; i < oa.size(); ++i) diff |= (oa[i] ^ ob[i]);
    diff &= valid_mask;
    if (diff == 0) return true;
    int lane = 0;
    while (((diff >> lane) & 1U) == 0) ++lane;
    BitString cex(ni);
    for (std::size_t i = 0; i < ni; ++i) cex.set(i, ((in[i] >> lane) & 1U) != 0);
    r.equivalent = false;
    r.counterexample = cex;
    return false;
  };

  if (ni <= opts.exhaustive_limit) {
    r.exhaustive = true;
    const std::uint64_t total = std::uint64_t{1} << ni;
    for (std::uint64_t base = 0; base < total; base += 64) {
      exhaustive_patterns(base, in);
      const std::uint64_t remaining = total - base;
      const std::uint64_t mask = remaining >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << remaining) - 1);
      r.vectors += std::min<std::uint64_t>(remaining, 64);
      if (!compare(mask)) return r;
    }
    return r;
  }
  SplitMix64 rng(opts.seed);
  for (std::size_t done = 0; done < opts.samples; done += 64) {
    for (auto& w : in) w = rng.next();
    const std::size_t remaining = opts.samples - done;
    const std::uint64_t mask = remaining >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << remaining) - 1);
    r.vectors += std::min<std::size_t>(remaining, 64);
    if (!compare(mask)) return r;
  }
  return r;
}

}  // namespace topoveil
