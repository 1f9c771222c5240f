#include "topoveil/elaborate.hpp"

#include <set>

#include "topoveil/error.hpp"

namespace topoveil {

std::size_t mux_tree_cells(std::size_t candidates) {
  return (std::size_t{1} << select_width(candidates)) - 1;
}

std::string out_port_name(const Endpoint& e) { return e.node + "_out" + std::to_string(e.port); }
std::string in_port_name(const Endpoint& e) { return e.node + "_in" + std::to_string(e.port); }

Netlist elaborate(const ObfuscatedDesign& d, int bus_width) {
  if (bus_width < 1) throw Error(ErrorCode::ZeroWidth, "bus width must be at least 1");
  NetlistBuilder b(d.base.label().empty() ? "obnocs" : "obnocs_" + d.base.label());

  std::set<Endpoint> sources;
  std::set<Endpoint> targets;
  for (const auto& g : d.groups) {
    for (const auto& lane : g.lanes) {
      sources.insert(lane.candidates.begin(), lane.candidates.end());
      targets.insert(lane.target);
    }
  }
  std::map<Endpoint, std::vector<std::string>> src_nets, dst_nets;
  for (const auto& e : sources) src_nets[e] = b.add_input(out_port_name(e), bus_width);
  std::vector<std::string> key;
  if (d.key_length > 0) key = b.add_input(std::string(kKeyPort), static_cast<int>(d.key_length));
  for (const auto& e : targets) dst_nets[e] = b.add_output(in_port_name(e), bus_width);

  std::string zero;
  std::size_t off = 0;
  for (const auto& g : d.groups) {
    for (const auto& lane : g.lanes) {
      const std::size_t leaves = std::size_t{1} << lane.width;
      for (int bit = 0; bit < bus_width; ++bit) {
        std::vector<std::string> level;
        for (std::size_t i = 0; i < leaves; ++i) {
          if (i < lane.candidates.size()) {
            level.push_back(src_nets[lane.candidates[i]][bit]);
          } else {
            if (zero.empty()) zero = b.const0();
            level.push_back(zero);
          }
        }
        for (int l = 0; l < lane.width; ++l) {
          const std::string& sel = key[off + lane.width - 1 - l];
          const bool top = l + 1 == lane.width;
          std::vector<std::string> next;
          for (std::size_t i = 0; i < level.size(); i += 2) {
            next.push_back(b.mux(level[i], level[i + 1], sel, top ? dst_nets[lane.target][bit] : std::string{}));
          }
          level = std::move(next);
        }
      }
      off += lane.width;
    }
  }
  return std::move(b).build();
}

Netlist elaborate_sipo(std::size_t width) {
  if (width == 0) throw Error(ErrorCode::ZeroWidth, "SIPO register width must be positive");
  NetlistBuilder b("ap_load_reg");
  const std::string ap_in = b.add_input("ap_in")[0];
  const std::string load_en = b.add_input("load_en")[0];
  const std::string clk = b.add_input("clk")[0];
  const auto q = b.add_output(std::string(kKeyPort), static_cast<int>(width));
  for (std::size_t i = 0; i < width; ++i) {
    const std::string& shift_in = i + 1 < width ? q[i + 1] : ap_in;
    b.dff(b.mux(q[i], shift_in, load_en), clk, q[i]);
  }
  return std::move(b).build();
}

}  // namespace topoveil
