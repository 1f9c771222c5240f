#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "topoveil/bitstring.hpp"
#include "topoveil/obnocs.hpp"
#include "topoveil/topology.hpp"

namespace topoveil {

enum class AluOp { Add, Sub, And, Or, Xor };
std::string_view to_string(AluOp op);
std::optional<AluOp> alu_op_from_string(std::string_view s);
/// 32-bit two's-complement, wrapping.
std::int32_t alu(AluOp op, std::int32_t a, std::int32_t b);

struct Message {
  NodeId src;
  NodeId dst;
  AluOp op = AluOp::Add;
  std::int32_t a = 0;
  std::int32_t b = 0;
  bool operator==(const Message&) const = default;
};
using Workload = std::vector<Message>;

std::string to_json(const Workload& w);
Workload workload_from_json(std::string_view text);

/// Next-hop out-port per (router, destination IP).
struct RoutingTable {
  std::map<NodeId, std::map<NodeId, int>> next_port;
  std::optional<int> lookup(const NodeId& router, const NodeId& dst) const;
  bool operator==(const RoutingTable&) const = default;
};

/// Shortest paths through routers, ties broken by next-hop id then port.
/// Unreachable destinations have no entry. Throws NonFunctionalTopology.
RoutingTable build_routes(const Topology& t);

enum class DeliveryStatus { Delivered, Misdelivered, Dropped, Looped };
std::string_view to_string(DeliveryStatus s);

struct DeliveryRecord {
  DeliveryStatus status = DeliveryStatus::Dropped;
  NodeId final_node;
  std::vector<NodeId> path;
  bool operator==(const DeliveryRecord&) const = default;
};

struct AluResult {
  std::size_t message = 0;
  std::int32_t value = 0;
  bool operator==(const AluResult&) const = default;
};

struct DutRun {
  BitString key;
  TopologyClass cls = TopologyClass::NonFunctional;
  std::vector<DeliveryRecord> delivered;
  std::vector<AluResult> alu_results;
};

/// A fabricated design: routing firmware is compiled once against the
/// intended topology and shipped with every chip, whatever key it receives.
struct DutBench {
  ObfuscatedDesign design;
  Topology intended;
  RoutingTable firmware;
  NodeId alu;
};

DutBench make_bench(const ObfuscatedDesign& d, const BitString& activation_package, NodeId alu);

/// Hop-by-hop delivery over the induced topology. Non-functional keys
/// deliver nothing. Throws KeyLengthMismatch, or SchemaError for messages
/// naming unknown IPs.
DutRun run_dut(const DutBench& bench, const BitString& key, const Workload& w);

/// Independent runs in parallel; results in key order.
std::vector<DutRun> run_duts(const DutBench& bench, const std::vector<BitString>& keys, const Workload& w);

struct Coverage {
  std::set<Link> redacted;   // intended links behind switches
  std::set<Link> exercised;  // redacted links the golden run traverses
  bool complete() const { return exercised == redacted; }
};

/// Throws WorkloadCoverage when no redacted link is exercised.
Coverage check_coverage(const DutBench& bench, const Workload& w);

enum class DutOutcome { Match, FunctionalMismatch, Silent };
std::string_view to_string(DutOutcome o);

struct DivergenceReport {
  struct Row {
    BitString key;
    TopologyClass cls;
    DutOutcome outcome;
  };
  std::vector<Row> rows;
  std::size_t match = 0;
  std::size_t functional_mismatch = 0;
  std::size_t silent = 0;
};

/// Silent: nothing reached any IP. Match: identical delivery records and ALU
/// results. Throws WorkloadMismatch when runs cover different workloads.
DivergenceReport compare_runs(const DutRun& golden, const std::vector<DutRun>& others);

std::string to_json(const DivergenceReport& r);

}  // namespace topoveil
