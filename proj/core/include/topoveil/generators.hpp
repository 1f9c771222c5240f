#pragma once

#include <cstdint>

#include "topoveil/netlist.hpp"
#include "topoveil/topology.hpp"

namespace topoveil {

/// Five-router tree SoC with nine IP blocks, rendered as directed links.
/// R1 receives from R2 and drives IP6, R3, R4, R5 on out-ports 0..3. Every IP
/// sends to R2 (the collector) and is served by exactly one of R1/R3/R4/R5.
/// R1, R3, R4 and R5 each have four out-links, so redacting all of them takes
/// sixteen four-way switches.
Topology example_tree_soc();

/// One router "X" with `ips` attached IP blocks ("A", "B", ...), each linked
/// in both directions. Out- and in-degree of X both equal `ips`.
Topology star_topology(int ips);

struct RandomTopologyOptions {
  int min_routers = 2;
  int max_routers = 12;
  int min_ips_per_router = 1;
  int max_ips_per_router = 3;
  /// Extra router-to-router links beyond the spanning tree, as a percentage
  /// of the router count.
  int extra_link_percent = 25;
};

/// Seeded random functional topology: a bidirectional router tree with IPs
/// attached in both directions, plus a few extra one-way router links.
Topology random_topology(std::uint64_t seed, const RandomTopologyOptions& opts = {});

struct RandomNetlistOptions {
  int inputs = 8;
  int outputs = 4;
  int gates = 40;
  int dffs = 0;
  /// Percentage of gates that are MUX2.
  int mux_percent = 20;
};

/// Seeded random acyclic netlist. Inputs are single-bit ports i0.., outputs
/// o0..; gates draw operands from earlier nets.
Netlist random_netlist(std::uint64_t seed, const RandomNetlistOptions& opts = {});

/// Streaming router with Avalon-style ports (sink_data, sink_valid,
/// sink_startofpacket, sink_endofpacket, src_ready in; src_* and sink_ready
/// out). A tied-off enable gates everything except the data-driven valid, so
/// after synthesis only sink_data and src_valid remain connected.
Netlist avalon_router_fixture(int data_width);

}  // namespace topoveil
