#pragma once

#include <cstddef>
#include <string>

#include "topoveil/netlist.hpp"
#include "topoveil/obnocs.hpp"

namespace topoveil {

/// MUX2 cells in one bit of a k-candidate lane: a balanced tree over
/// 2^select_width(k) leaves, unused leaves tied to CONST0.
std::size_t mux_tree_cells(std::size_t candidates);

/// Port names used by elaborate for a switch endpoint.
std::string out_port_name(const Endpoint& e);  // "<node>_out<p>", an input of the switch netlist
std::string in_port_name(const Endpoint& e);   // "<node>_in<p>", an output of the switch netlist

/// Lowers every lane to bus_width MUX2 trees. The key port is "key" with the
/// activation package bits in canonical order; each lane's least significant
/// select bit drives the leaf level. Codes with no candidate output zero.
/// Throws ZeroWidth when bus_width < 1.
Netlist elaborate(const ObfuscatedDesign& d, int bus_width = 1);

/// Gate-level SIPO loader: inputs ap_in, load_en, clk; output "key" of
/// `width` bits. Each stage is a DFF behind a load-enable MUX2.
Netlist elaborate_sipo(std::size_t width);

}  // namespace topoveil
