#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "topoveil/bitstring.hpp"

namespace topoveil {

/// Serial-in parallel-out activation-package register. On an enabled clock
/// every bit moves one place toward index 0 (index 0 falls off) and the
/// serial input enters at index width-1. After `width` enabled clocks the
/// first serial bit sits at index 0, the most significant select bit of the
/// first canonical lane.
class SipoRegister {
 public:
  /// Throws ZeroWidth for width 0.
  static SipoRegister reset(std::size_t width);

  std::size_t width() const noexcept { return state_.size(); }
  const BitString& state() const noexcept { return state_; }
  bool load_enabled() const noexcept { return load_enabled_; }

  /// One clock edge. With load_en low the register is clock-gated.
  SipoRegister clock(bool ap_in, bool load_en) const;

  bool operator==(const SipoRegister&) const = default;

 private:
  SipoRegister() = default;
  BitString state_;
  bool load_enabled_ = false;
};

struct TraceRow {
  std::uint64_t cycle = 0;
  bool ap_in = false;
  bool load_en = false;
  BitString state;
};
using LoadTrace = std::vector<TraceRow>;

/// Shifts the package in over |ap| enabled cycles, then de-asserts load for
/// one cycle. Throws WidthMismatch when |ap| != width.
std::pair<SipoRegister, LoadTrace> load_package(const SipoRegister& r, const BitString& ap);

/// CSV with header cycle,ap_in,load_en,state_hex.
std::string trace_to_csv(const LoadTrace& trace);

}  // namespace topoveil
