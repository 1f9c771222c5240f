#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "topoveil/bitstring.hpp"
#include "topoveil/topology.hpp"

namespace topoveil {

using BigInt = boost::multiprecision::cpp_int;

enum class SwitchSide { SourceDemux, DestMux };
std::string_view to_string(SwitchSide s);

/// One programmable k:1 multiplexer. Its output drives `target` (an in-port);
/// its inputs are the candidate out-ports in wired order, so select code c
/// connects candidates[c] -> target. Codes >= candidates.size() leave the
/// target disconnected.
struct Lane {
  std::string id;
  Endpoint target;
  std::vector<Endpoint> candidates;
  int width = 1;

  bool operator==(const Lane&) const = default;
};

/// SourceDemux groups redact a router's out-links (lanes at the original
/// destinations, candidates = the router's out-ports). DestMux groups redact
/// the router's in-links from non-redacted sources (lanes at the router's
/// in-ports, candidates = those sources).
struct SwitchGroup {
  NodeId router;
  SwitchSide side = SwitchSide::SourceDemux;
  std::vector<Lane> lanes;
  std::uint64_t wiring_seed = 0;

  bool operator==(const SwitchGroup&) const = default;
};

struct ObfuscatedDesign {
  Topology base;  // intended topology with redacted links removed
  std::vector<SwitchGroup> groups;
  int stages = 1;
  std::size_t key_length = 0;

  std::size_t lane_count() const;
  bool operator==(const ObfuscatedDesign& o) const {
    return topology_equal(base, o.base) && base.label() == o.base.label() && groups == o.groups &&
           stages == o.stages && key_length == o.key_length;
  }
};

/// Activation package: select codes MSB-first per lane, lanes concatenated in
/// canonical group order (router id, then SourceDemux before DestMux, then
/// lane index).
using ActivationPackage = BitString;

struct InsertOptions {
  int stages = 1;
  std::uint64_t seed = 0;
  /// When false, every lane keeps its candidates in sorted order.
  bool shuffle = true;
  /// Extra candidate out-ports added to a router's SourceDemux lanes.
  std::map<NodeId, std::vector<Endpoint>> extensions;
};

struct Obfuscation {
  ObfuscatedDesign design;
  ActivationPackage activation_package;
};

/// Select width for a k-candidate lane: ceil(log2 k), at least 1.
int select_width(std::size_t candidates);

Obfuscation insert_switches(const Topology& t, const std::set<NodeId>& routers,
                            const InsertOptions& opts = {});

/// Total: any key yields a candidate topology (possibly non-functional).
Topology induce_topology(const ObfuscatedDesign& d, const BitString& key);

struct KeyRecord {
  BitString key;
  TopologyClass cls = TopologyClass::NonFunctional;
  std::uint64_t digest = 0;
};

struct EnumerateOptions {
  /// Largest key length enumerated exhaustively.
  std::size_t cap_bits = 24;
  /// When set and the key is longer than the cap, visit this many seeded
  /// random keys instead of failing.
  std::optional<std::uint64_t> samples;
  std::uint64_t seed = 0;
  /// Worker threads for counting; 0 picks hardware concurrency.
  unsigned threads = 0;
};

/// Visits every key (MSB-first integer order) or a seeded sample. With no
/// intended topology, functional keys are reported as LegalAlternate: the
/// attacker's view, where the intended member is indistinguishable.
void for_each_key(const ObfuscatedDesign& d, const Topology* intended, const EnumerateOptions& opts,
                  const std::function<void(const KeyRecord&)>& visit);

std::vector<KeyRecord> enumerate_keys(const ObfuscatedDesign& d, const Topology* intended,
                                      const EnumerateOptions& opts = {});

struct LegalCount {
  std::uint64_t enumerated = 0;  // distinct functional topologies seen
  BigInt formula;                // product of (candidate count)! over groups
  std::uint64_t keys_visited = 0;
  bool exhaustive = true;
};

BigInt legal_formula(const ObfuscatedDesign& d);
LegalCount count_legal(const ObfuscatedDesign& d, const EnumerateOptions& opts = {});

/// Lowest key inducing `target`, if any. Solved lane by lane, so it works at
/// any key length. Throws NodeSetMismatch if the node sets differ.
std::optional<BitString> recover_key_for(const ObfuscatedDesign& d, const Topology& target);

/// Lane-wise view of a key: select code per lane in canonical order.
std::vector<std::uint64_t> lane_codes(const ObfuscatedDesign& d, const BitString& key);

std::string to_json(const ObfuscatedDesign& d);
ObfuscatedDesign design_from_json(std::string_view text);

}  // namespace topoveil
