#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "topoveil/bitstring.hpp"
#include "topoveil/netlist.hpp"

namespace topoveil {

/// Bit-parallel evaluator over the combinational frame: 64 input patterns per
/// call. Frame inputs are the primary input bits (port order) followed by DFF
/// outputs; frame outputs are the primary output bits followed by DFF inputs.
class Simulator {
 public:
  explicit Simulator(const Netlist& n);

  std::size_t input_count() const noexcept { return inputs_.size(); }
  std::size_t output_count() const noexcept { return outputs_.size(); }
  const std::vector<std::string>& input_nets() const noexcept { return input_names_; }
  const std::vector<std::string>& output_nets() const noexcept { return output_names_; }

  void eval(std::span<const std::uint64_t> in, std::span<std::uint64_t> out) const;
  BitString eval(const BitString& in) const;

 private:
  struct Op {
    CellKind kind;
    std::uint32_t a = 0, b = 0, s = 0, y = 0;
  };
  std::vector<Op> ops_;
  std::vector<std::uint32_t> inputs_;
  std::vector<std::uint32_t> outputs_;
  std::vector<std::string> input_names_;
  std::vector<std::string> output_names_;
  std::size_t net_count_ = 0;
};

/// Fills 64 patterns: pattern p (0..63) gets vector index base+p; bit i of
/// that index drives input i.
void exhaustive_patterns(std::uint64_t base, std::span<std::uint64_t> words);

struct EquivalenceOptions {
  std::size_t exhaustive_limit = 20;
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
};

struct EquivalenceResult {
  bool equivalent = true;
  bool exhaustive = false;
  std::uint64_t vectors = 0;
  std::optional<BitString> counterexample;
};

/// I/O equivalence of two netlists with identical frame interfaces (same
/// input and output net names). Exhaustive up to `exhaustive_limit` inputs,
/// otherwise `samples` seeded random vectors.
EquivalenceResult check_equivalence(const Netlist& a, const Netlist& b,
                                    const EquivalenceOptions& opts = {});

}  // namespace topoveil
