#include "topoveil/workload.hpp"

#include <algorithm>
#include <deque>
#include <thread>

#include "json_io.hpp"
#include "topoveil/error.hpp"

namespace topoveil {

std::string_view to_string(AluOp op) {
  switch (op) {
    case AluOp::Add: return "ADD";
    case AluOp::Sub: return "SUB";
    case AluOp::And: return "AND";
    case AluOp::Or: return "OR";
    case AluOp::Xor: return "XOR";
  }
  return "?";
}

std::optional<AluOp> alu_op_from_string(std::string_view s) {
  for (auto op : {AluOp::Add, AluOp::Sub, AluOp::And, AluOp::Or, AluOp::Xor}) {
    if (to_string(op) == s) return op;
  }
  return std::nullopt;
}

std::int32_t alu(AluOp op, std::int32_t a, std::int32_t b) {
  const auto ua = static_cast<std::uint32_t>(a), ub = static_cast<std::uint32_t>(b);
  std::uint32_t r = 0;
  switch (op) {
    case AluOp::Add: r = ua + ub; break;
    case AluOp::Sub: r = ua - ub; break;
    case AluOp::And: r = ua & ub; break;
    case AluOp::Or: r = ua | ub; break;
    case AluOp::Xor: r = ua ^ ub; break;
  }
  return static_cast<std::int32_t>(r);
}

std::string to_json(const Workload& w) {
  detail::json j = detail::json::array();
  for (const auto& m : w) {
    j.push_back({{"src", m.src}, {"dst", m.dst}, {"op", std::string(to_string(m.op))}, {"a", m.a}, {"b", m.b}});
  }
  return detail::dump(j);
}

Workload workload_from_json(std::string_view text) {
  using detail::get_field;
  const auto j = detail::parse_json(text, "workload");
  if (!j.is_array()) throw Error(ErrorCode::SchemaError, "workload: expected an array");
  Workload w;
  for (const auto& e : j) {
    Message m;
    m.src = get_field<std::string>(e, "src", "message");
    m.dst = get_field<std::string>(e, "dst", "message");
    const auto op = get_field<std::string>(e, "op", "message");
    const auto parsed = alu_op_from_string(op);
    if (!parsed) throw Error(ErrorCode::SchemaError, "message: unknown op " + op);
    m.op = *parsed;
    m.a = get_field<std::int32_t>(e, "a", "message");
    m.b = get_field<std::int32_t>(e, "b", "message");
    w.push_back(std::move(m));
  }
  return w;
}

std::optional<int> RoutingTable::lookup(const NodeId& router, const NodeId& dst) const {
  auto r = next_port.find(router);
  if (r == next_port.end()) return std::nullopt;
  auto d = r->second.find(dst);
  if (d == r->second.end()) return std::nullopt;
  return d->second;
}

RoutingTable build_routes(const Topology& t) {
  if (!validate(t).functional()) throw Error(ErrorCode::NonFunctionalTopology, t.label());
  std::map<NodeId, std::vector<Link>> ins, outs;
  for (const auto& l : t.links()) {
    ins[l.dst.node].push_back(l);
    outs[l.src.node].push_back(l);
  }
  auto is_router = [&](const NodeId& id) { return t.find(id)->kind == NodeKind::Router; };

  RoutingTable rt;
  for (const auto& [dst, node] : t.nodes()) {
    if (node.kind != NodeKind::IP) continue;
    std::map<NodeId, int> dist{{dst, 0}};
    std::deque<NodeId> q{dst};
    while (!q.empty()) {
      const NodeId x = q.front();
      q.pop_front();
      for (const auto& l : ins[x]) {
        if (is_router(l.src.node) && !dist.count(l.src.node)) {
          dist[l.src.node] = dist[x] + 1;
          q.push_back(l.src.node);
        }
      }
    }
    for (const auto& [r, d] : dist) {
      if (r == dst || !is_router(r)) continue;
      const Link* best = nullptr;
      for (const auto& l : outs[r]) {
        auto it = dist.find(l.dst.node);
        if (it == dist.end() || it->second != d - 1) continue;
        if (l.dst.node != dst && !is_router(l.dst.node)) continue;
        if (best == nullptr || std::tie(l.dst.node, l.src.port) < std::tie(best->dst.node, best->src.port)) {
          best = &l;
        }
      }
      if (best != nullptr) rt.next_port[r][dst] = best->src.port;
    }
  }
  return rt;
}

std::string_view to_string(DeliveryStatus s) {
  switch (s) {
    case DeliveryStatus::Delivered: return "delivered";
    case DeliveryStatus::Misdelivered: return "misdelivered";
    case DeliveryStatus::Dropped: return "dropped";
    case DeliveryStatus::Looped: return "looped";
  }
  return "?";
}

std::string_view to_string(DutOutcome o) {
  switch (o) {
    case DutOutcome::Match: return "match";
    case DutOutcome::FunctionalMismatch: return "functional-mismatch";
    case DutOutcome::Silent: return "silent";
  }
  return "?";
}

DutBench make_bench(const ObfuscatedDesign& d, const BitString& activation_package, NodeId alu_node) {
  DutBench b{d, induce_topology(d, activation_package), {}, std::move(alu_node)};
  const Node* n = b.intended.find(b.alu);
  if (n == nullptr || n->kind != NodeKind::IP) throw Error(ErrorCode::SchemaError, "ALU node " + b.alu + " is not an IP");
  b.firmware = build_routes(b.intended);
  return b;
}

namespace {

void check_workload(const Topology& t, const Workload& w) {
  for (const auto& m : w) {
    for (const auto* id : {&m.src, &m.dst}) {
      const Node* n = t.find(*id);
      if (n == nullptr || n->kind != NodeKind::IP) throw Error(ErrorCode::SchemaError, "workload names non-IP " + *id);
    }
  }
}

DeliveryRecord deliver(const Topology& t, const std::map<Endpoint, Endpoint>& wire, const RoutingTable& fw,
                       const Message& m) {
  DeliveryRecord rec;
  rec.path.push_back(m.src);
  const std::size_t limit = 4 * t.nodes().size();
  NodeId at = m.src;
  int port = 0;  // IPs inject on out-port 0
  for (;;) {
    auto it = wire.find(Endpoint{at, port});
    if (it == wire.end()) {
      rec.status = DeliveryStatus::Dropped;
      break;
    }
    at = it->second.node;
    rec.path.push_back(at);
    if (t.find(at)->kind == NodeKind::IP) {
      rec.status = at == m.dst ? DeliveryStatus::Delivered : DeliveryStatus::Misdelivered;
      break;
    }
    if (rec.path.size() > limit) {
      rec.status = DeliveryStatus::Looped;
      break;
    }
    const auto p = fw.lookup(at, m.dst);
    if (!p) {
      rec.status = DeliveryStatus::Dropped;
      break;
    }
    port = *p;
  }
  rec.final_node = at;
  return rec;
}

}  // namespace

DutRun run_dut(const DutBench& bench, const BitString& key, const Workload& w) {
  const Topology t = induce_topology(bench.design, key);
  check_workload(t, w);
  DutRun run{key, classify(t, bench.intended), {}, {}};
  if (run.cls == TopologyClass::NonFunctional) {
    for (const auto& m : w) run.delivered.push_back({DeliveryStatus::Dropped, m.src, {m.src}});
    return run;
  }
  std::map<Endpoint, Endpoint> wire;
  for (const auto& l : t.links()) wire.emplace(l.src, l.dst);
  for (std::size_t i = 0; i < w.size(); ++i) {
    auto rec = deliver(t, wire, bench.firmware, w[i]);
    if (rec.status != DeliveryStatus::Dropped && rec.status != DeliveryStatus::Looped &&
        rec.final_node == bench.alu) {
      run.alu_results.push_back({i, alu(w[i].op, w[i].a, w[i].b)});
    }
    run.delivered.push_back(std::move(rec));
  }
  return run;
}

std::vector<DutRun> run_duts(const DutBench& bench, const std::vector<BitString>& keys, const Workload& w) {
  std::vector<DutRun> runs(keys.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      pool.emplace_back([&, i] { runs[i] = run_dut(bench, keys[i], w); });
    }
  }
  return runs;
}

Coverage check_coverage(const DutBench& bench, const Workload& w) {
  Coverage c;
  std::map<Endpoint, Link> by_target;
  for (const auto& l : bench.intended.links()) by_target.emplace(l.dst, l);
  for (const auto& g : bench.design.groups) {
    for (const auto& lane : g.lanes) {
      if (auto it = by_target.find(lane.target); it != by_target.end()) c.redacted.insert(it->second);
    }
  }
  std::map<Endpoint, Endpoint> wire;
  for (const auto& l : bench.intended.links()) wire.emplace(l.src, l.dst);
  check_workload(bench.intended, w);
  for (const auto& m : w) {
    // Re-walk the golden path, link by link.
    NodeId at = m.src;
    int port = 0;
    for (std::size_t hops = 0; hops <= 4 * bench.intended.nodes().size(); ++hops) {
      auto it = wire.find(Endpoint{at, port});
      if (it == wire.end()) break;
      const Link l{it->first, it->second};
      if (c.redacted.count(l)) c.exercised.insert(l);
      at = l.dst.node;
      if (bench.intended.find(at)->kind == NodeKind::IP) break;
      const auto p = bench.firmware.lookup(at, m.dst);
      if (!p) break;
      port = *p;
    }
  }
  if (c.exercised.empty()) throw Error(ErrorCode::WorkloadCoverage, "workload never traverses a redacted link");
  return c;
}

DivergenceReport compare_runs(const DutRun& golden, const std::vector<DutRun>& others) {
  DivergenceReport r;
  for (const auto& run : others) {
    if (run.delivered.size() != golden.delivered.size()) {
      throw Error(ErrorCode::WorkloadMismatch, "runs cover different workloads");
    }
    const bool reached = std::any_of(run.delivered.begin(), run.delivered.end(), [](const DeliveryRecord& d) {
      return d.status == DeliveryStatus::Delivered || d.status == DeliveryStatus::Misdelivered;
    });
    DutOutcome o = DutOutcome::FunctionalMismatch;
    if (!reached) {
      o = DutOutcome::Silent;
      ++r.silent;
    } else if (run.delivered == golden.delivered && run.alu_results == golden.alu_results) {
      o = DutOutcome::Match;
      ++r.match;
    } else {
      ++r.functional_mismatch;
    }
    r.rows.push_back({run.key, run.cls, o});
  }
  return r;
}

std::string to_json(const DivergenceReport& r) {
  detail::json rows = detail::json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"key_hex", row.key.to_hex()},
                    {"class", std::string(to_string(row.cls))},
                    {"outcome", std::string(to_string(row.outcome))}});
  }
  detail::json j = {{"duts", rows},
                    {"tally", {{"match", r.match}, {"functional-mismatch", r.functional_mismatch}, {"silent", r.silent}}}};
  return detail::dump(j);
}

}  // namespace topoveil
