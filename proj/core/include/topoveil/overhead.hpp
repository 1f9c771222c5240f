#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "topoveil/obnocs.hpp"
#include "topoveil/topology.hpp"

namespace topoveil {

enum class ObfuscationLevel { L0, I, II, III, IV };
std::string_view to_string(ObfuscationLevel l);
std::optional<ObfuscationLevel> level_from_string(std::string_view s);
/// 0, 2, 4, 8, 16.
int router_count(ObfuscationLevel l);

struct DesignOverhead {
  std::size_t key_bits = 0;
  std::size_t mux2_cells = 0;     // (m-1) per lane bit
  std::size_t register_bits = 0;  // AP load register
  std::size_t added_depth = 0;    // MUX levels on the longest switched path
  bool operator==(const DesignOverhead&) const = default;
};

DesignOverhead design_overhead(const ObfuscatedDesign& d, int bus_width = 1);

struct OverheadOptions {
  int stages = 1;
  int bus_width = 1;
  /// Random router subsets to average; 0 averages over every subset.
  std::uint64_t samples = 10;
  std::uint64_t seed = 0;
  /// Clamp the level's router count to the redactable routers instead of
  /// failing.
  bool cap = false;
};

struct OverheadReport {
  ObfuscationLevel level = ObfuscationLevel::L0;
  int requested_routers = 0;
  int routers = 0;
  bool capped = false;
  std::vector<std::set<NodeId>> subsets;
  std::vector<DesignOverhead> rows;
  double mean_key_bits = 0;
  double mean_mux2_cells = 0;
  double mean_register_bits = 0;
  double mean_added_depth = 0;
};

/// Routers with at least two out-links, in id order.
std::vector<NodeId> redactable_routers(const Topology& t);

/// Averages over router subsets of the level's size. Subsets for sample s
/// are prefixes of one seeded shuffle, so a sample's subset at one level
/// contains its subset at every lower level. Throws LevelExceedsRouters.
OverheadReport overhead_report(const Topology& t, ObfuscationLevel level, const OverheadOptions& opts = {});

std::string to_json(const OverheadReport& r);

}  // namespace topoveil
