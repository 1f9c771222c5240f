#include "topoveil/generators.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "topoveil/error.hpp"
#include "topoveil/prng.hpp"

namespace topoveil {

namespace {

/// Collects links while counting ports per node, then emits a topology whose
/// port counts match the links exactly.
class LinkPlan {
 public:
  void node(const NodeId& id, NodeKind kind) { kinds_.emplace(id, kind); }

  void link(const NodeId& src, const NodeId& dst) {
    links_.push_back(Link{{src, out_[src]++}, {dst, in_[dst]++}});
  }

  Topology finish(std::string label) const {
    Topology t(std::move(label));
    for (const auto& [id, kind] : kinds_) {
      auto count = [&](const std::map<NodeId, int>& m) {
        auto it = m.find(id);
        return it == m.end() ? 0 : it->second;
      };
      t.add_node(Node{id, kind, count(in_), count(out_)});
    }
    for (const auto& l : links_) t.add_link(l);
    return t;
  }

 private:
  std::map<NodeId, NodeKind> kinds_;
  std::map<NodeId, int> in_, out_;
  std::vector<Link> links_;
};

}  // namespace

Topology example_tree_soc() {
  LinkPlan p;
  for (int r = 1; r <= 5; ++r) p.node("R" + std::to_string(r), NodeKind::Router);
  for (int k = 1; k <= 9; ++k) p.node("IP" + std::to_string(k), NodeKind::IP);

  for (int k = 1; k <= 9; ++k) p.link("IP" + std::to_string(k), "R2");
  p.link("R2", "R1");
  p.link("R1", "IP6");
  p.link("R1", "R3");
  p.link("R1", "R4");
  p.link("R1", "R5");
  p.link("R3", "IP1");
  p.link("R3", "IP2");
  p.link("R3", "IP3");
  p.link("R3", "R2");
  p.link("R4", "IP4");
  p.link("R4", "IP5");
  p.link("R4", "IP7");
  p.link("R4", "R2");
  p.link("R5", "IP8");
  p.link("R5", "IP9");
  p.link("R5", "R2");
  p.link("R5", "R3");
  return p.finish("tree-soc");
}

Topology star_topology(int ips) {
  if (ips < 1 || ips > 26) throw Error(ErrorCode::InvalidTopology, "star size must be 1..26");
  LinkPlan p;
  p.node("X", NodeKind::Router);
  for (int i = 0; i < ips; ++i) {
    const NodeId ip(1, static_cast<char>('A' + i));
    p.node(ip, NodeKind::IP);
    p.link(ip, "X");
  }
  for (int i = 0; i < ips; ++i) p.link("X", NodeId(1, static_cast<char>('A' + i)));
  return p.finish("star" + std::to_string(ips));
}

Topology random_topology(std::uint64_t seed, const RandomTopologyOptions& opts) {
  if (opts.min_routers < 2 || opts.max_routers < opts.min_routers || opts.min_ips_per_router < 1 ||
      opts.max_ips_per_router < opts.min_ips_per_router) {
    throw Error(ErrorCode::InvalidTopology, "bad random topology options");
  }
  SplitMix64 rng(seed);
  const int routers =
      opts.min_routers + static_cast<int>(rng.below(opts.max_routers - opts.min_routers + 1));
  LinkPlan p;
  auto rid = [](int i) { return "R" + std::to_string(i + 1); };
  for (int i = 0; i < routers; ++i) p.node(rid(i), NodeKind::Router);
  for (int i = 1; i < routers; ++i) {
    const int parent = static_cast<int>(rng.below(i));
    p.link(rid(parent), rid(i));
    p.link(rid(i), rid(parent));
  }
  int ip = 0;
  for (int i = 0; i < routers; ++i) {
    const int k = opts.min_ips_per_router +
                  static_cast<int>(rng.below(opts.max_ips_per_router - opts.min_ips_per_router + 1));
    for (int j = 0; j < k; ++j) {
      const NodeId id = "IP" + std::to_string(++ip);
      p.node(id, NodeKind::IP);
      p.link(id, rid(i));
      p.link(rid(i), id);
    }
  }
  const int extra = routers * opts.extra_link_percent / 100;
  for (int e = 0; e < extra; ++e) {
    const int a = static_cast<int>(rng.below(routers));
    const int b = static_cast<int>(rng.below(routers));
    if (a != b) p.link(rid(a), rid(b));
  }
  return p.finish("random-" + std::to_string(seed));
}

Netlist random_netlist(std::uint64_t seed, const RandomNetlistOptions& opts) {
  if (opts.inputs < 1 || opts.outputs < 1 || opts.gates < 0 || opts.dffs < 0) {
    throw Error(ErrorCode::ZeroWidth, "random netlist needs inputs and outputs");
  }
  SplitMix64 rng(seed);
  NetlistBuilder b("random" + std::to_string(seed));
  std::vector<std::string> pool;
  for (int i = 0; i < opts.inputs; ++i) pool.push_back(b.add_input("i" + std::to_string(i))[0]);
  std::string clk;
  std::vector<std::string> qs;
  if (opts.dffs > 0) {
    clk = b.add_input("clk")[0];
    for (int i = 0; i < opts.dffs; ++i) {
      qs.push_back(b.fresh_net("q"));
      pool.push_back(qs.back());
    }
  }
  auto pick = [&] { return pool[rng.below(pool.size())]; };
  for (int g = 0; g < opts.gates; ++g) {
    std::string y;
    if (static_cast<int>(rng.below(100)) < opts.mux_percent) {
      y = b.mux(pick(), pick(), pick());
    } else {
      switch (rng.below(4)) {
        case 0: y = b.and_(pick(), pick()); break;
        case 1: y = b.or_(pick(), pick()); break;
        case 2: y = b.xor_(pick(), pick()); break;
        default: y = b.not_(pick()); break;
      }
    }
    pool.push_back(y);
  }
  for (const auto& q : qs) b.dff(pick(), clk, q);
  // Outputs favour the most recent nets so that most gates stay observable.
  const std::size_t tail = std::max<std::size_t>(pool.size() / 2, 1);
  for (int o = 0; o < opts.outputs; ++o) {
    const std::string src = pool[pool.size() - 1 - rng.below(tail)];
    b.buf(src, b.add_output("o" + std::to_string(o))[0]);
  }
  return std::move(b).build();
}

Netlist avalon_router_fixture(int data_width) {
  if (data_width < 1) throw Error(ErrorCode::ZeroWidth, "data width must be at least 1");
  NetlistBuilder b("router_000");
  const auto data = b.add_input("sink_data", data_width);
  const auto valid = b.add_input("sink_valid")[0];
  const auto sop = b.add_input("sink_startofpacket")[0];
  const auto eop = b.add_input("sink_endofpacket")[0];
  const auto ready = b.add_input("src_ready")[0];
  const auto src_data = b.add_output("src_data", data_width);
  const auto src_valid = b.add_output("src_valid")[0];
  const auto src_sop = b.add_output("src_startofpacket")[0];
  const auto src_eop = b.add_output("src_endofpacket")[0];
  const auto sink_ready = b.add_output("sink_ready")[0];

  const std::string en = b.const0("cfg_en");
  for (int i = 0; i < data_width; ++i) b.and_(data[i], en, src_data[i]);
  std::string any = data[0];
  for (int i = 1; i < data_width; ++i) any = b.or_(any, data[i]);
  b.or_(b.and_(valid, en), any, src_valid);
  b.and_(sop, en, src_sop);
  b.and_(eop, en, src_eop);
  b.and_(ready, en, sink_ready);
  return std::move(b).build();
}

}  // namespace topoveil
