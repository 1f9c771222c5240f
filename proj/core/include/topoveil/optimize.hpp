#pragma once

#include "topoveil/netlist.hpp"

namespace topoveil {

/// Synthesis-lite: constant propagation, BUF collapsing, structural hashing
/// and dead-logic removal, repeated to a fixpoint. Cells live only if they
/// reach an output port or a DFF. Constants are shared through the cells
/// "$const0"/"$const1". Throws CombLoopError.
Netlist synthesize_lite(const Netlist& n);

}  // namespace topoveil
