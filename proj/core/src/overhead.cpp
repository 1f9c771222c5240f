#include "topoveil/overhead.hpp"

#include <algorithm>
#include <map>

#include "json_io.hpp"
#include "topoveil/error.hpp"
#include "topoveil/prng.hpp"

namespace topoveil {

std::string_view to_string(ObfuscationLevel l) {
  switch (l) {
    case ObfuscationLevel::L0: return "0";
    case ObfuscationLevel::I: return "I";
    case ObfuscationLevel::II: return "II";
    case ObfuscationLevel::III: return "III";
    case ObfuscationLevel::IV: return "IV";
  }
  return "?";
}

std::optional<ObfuscationLevel> level_from_string(std::string_view s) {
  for (auto l : {ObfuscationLevel::L0, ObfuscationLevel::I, ObfuscationLevel::II, ObfuscationLevel::III,
                 ObfuscationLevel::IV}) {
    if (to_string(l) == s) return l;
  }
  return std::nullopt;
}

int router_count(ObfuscationLevel l) {
  switch (l) {
    case ObfuscationLevel::L0: return 0;
    case ObfuscationLevel::I: return 2;
    case ObfuscationLevel::II: return 4;
    case ObfuscationLevel::III: return 8;
    case ObfuscationLevel::IV: return 16;
  }
  return 0;
}

DesignOverhead design_overhead(const ObfuscatedDesign& d, int bus_width) {
  if (bus_width < 1) throw Error(ErrorCode::ZeroWidth, "bus width must be at least 1");
  DesignOverhead o;
  std::map<SwitchSide, std::size_t> depth;
  for (const auto& g : d.groups) {
    for (const auto& lane : g.lanes) {
      o.key_bits += static_cast<std::size_t>(lane.width);
      o.mux2_cells += (lane.candidates.size() - 1) * static_cast<std::size_t>(bus_width);
      depth[g.side] = std::max(depth[g.side], static_cast<std::size_t>(lane.width));
    }
  }
  o.register_bits = o.key_bits;
  for (const auto& [side, levels] : depth) o.added_depth += levels;
  return o;
}

std::vector<NodeId> redactable_routers(const Topology& t) {
  std::vector<NodeId> out;
  for (const auto& id : t.router_ids()) {
    if (t.out_links(id).size() >= 2) out.push_back(id);
  }
  return out;
}

namespace {

void combinations(const std::vector<NodeId>& pool, std::size_t k, std::size_t start, std::set<NodeId>& cur,
                  std::vector<std::set<NodeId>>& out) {
  if (cur.size() == k) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = start; i + (k - cur.size()) <= pool.size(); ++i) {
    cur.insert(pool[i]);
    combinations(pool, k, i + 1, cur, out);
    cur.erase(pool[i]);
  }
}

}  // namespace

OverheadReport overhead_report(const Topology& t, ObfuscationLevel level, const OverheadOptions& opts) {
  const auto pool = redactable_routers(t);
  OverheadReport r;
  r.level = level;
  r.requested_routers = router_count(level);
  r.routers = r.requested_routers;
  if (static_cast<std::size_t>(r.routers) > pool.size()) {
    if (!opts.cap) {
      throw Error(ErrorCode::LevelExceedsRouters, "level " + std::string(to_string(level)) + " needs " +
                                                      std::to_string(r.routers) + " routers, topology has " +
                                                      std::to_string(pool.size()) + " redactable");
    }
    r.routers = static_cast<int>(pool.size());
    r.capped = true;
  }
  const auto k = static_cast<std::size_t>(r.routers);
  if (opts.samples == 0) {
    std::set<NodeId> cur;
    combinations(pool, k, 0, cur, r.subsets);
  } else {
    for (std::uint64_t s = 0; s < opts.samples; ++s) {
      SplitMix64 rng(opts.seed + s);
      std::vector<NodeId> order = pool;
      fisher_yates(std::span<NodeId>(order), rng);
      r.subsets.emplace_back(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    }
  }
  InsertOptions io;
  io.stages = opts.stages;
  io.shuffle = false;
  for (const auto& subset : r.subsets) {
    const auto d = insert_switches(t, subset, io).design;
    r.rows.push_back(design_overhead(d, opts.bus_width));
  }
  if (!r.rows.empty()) {
    std::uint64_t key = 0, mux = 0, reg = 0, depth = 0;
    for (const auto& row : r.rows) {
      key += row.key_bits;
      mux += row.mux2_cells;
      reg += row.register_bits;
      depth += row.added_depth;
    }
    // Sum first, divide once: integral means print as integers.
    const double n = static_cast<double>(r.rows.size());
    r.mean_key_bits = static_cast<double>(key) / n;
    r.mean_mux2_cells = static_cast<double>(mux) / n;
    r.mean_register_bits = static_cast<double>(reg) / n;
    r.mean_added_depth = static_cast<double>(depth) / n;
  }
  return r;
}

std::string to_json(const OverheadReport& r) {
  using detail::json;
  json subsets = json::array();
  for (std::size_t i = 0; i < r.subsets.size(); ++i) {
    subsets.push_back({{"routers", std::vector<std::string>(r.subsets[i].begin(), r.subsets[i].end())},
                       {"key_bits", r.rows[i].key_bits},
                       {"mux2_cells", r.rows[i].mux2_cells},
                       {"register_bits", r.rows[i].register_bits},
                       {"added_depth", r.rows[i].added_depth}});
  }
  json j = {{"level", std::string(to_string(r.level))},
            {"requested_routers", r.requested_routers},
            {"routers", r.routers},
            {"capped", r.capped},
            {"samples", subsets},
            {"mean", {{"key_bits", r.mean_key_bits},
                      {"mux2_cells", r.mean_mux2_cells},
                      {"register_bits", r.mean_register_bits},
                      {"added_depth", r.mean_added_depth}}},
            {"delta_vs_level0", {{"key_bits", r.mean_key_bits},
                                 {"mux2_cells", r.mean_mux2_cells},
                                 {"register_bits", r.mean_register_bits},
                                 {"added_depth", r.mean_added_depth}}},
            {"note", "analytic cell and bit counts; FPGA resource, power and timing figures are not modelled"}};
  return detail::dump(j);
}

}  // namespace topoveil
