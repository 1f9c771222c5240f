#include "topoveil/ap_loader.hpp"

#include <sstream>

#include "topoveil/error.hpp"

namespace topoveil {

SipoRegister SipoRegister::reset(std::size_t width) {
  if (width == 0) throw Error(ErrorCode::ZeroWidth, "SIPO register width must be positive");
  SipoRegister r;
  r.state_ = BitString(width);
  return r;
}

SipoRegister SipoRegister::clock(bool ap_in, bool load_en) const {
  SipoRegister next = *this;
  next.load_enabled_ = load_en;
  if (!load_en) return next;
  const std::size_t w = width();
  for (std::size_t i = 0; i + 1 < w; ++i) next.state_.set(i, state_[i + 1]);
  next.state_.set(w - 1, ap_in);
  return next;
}

std::pair<SipoRegister, LoadTrace> load_package(const SipoRegister& r, const BitString& ap) {
  if (ap.size() != r.width()) {
    throw Error(ErrorCode::WidthMismatch, "package has " + std::to_string(ap.size()) +
                                              " bits, register holds " + std::to_string(r.width()));
  }
  LoadTrace trace;
  SipoRegister cur = r;
  std::uint64_t cycle = 0;
  for (std::size_t i = 0; i < ap.size(); ++i) {
    cur = cur.clock(ap[i], true);
    trace.push_back({cycle++, ap[i], true, cur.state()});
  }
  cur = cur.clock(false, false);
  trace.push_back({cycle, false, false, cur.state()});
  return {cur, std::move(trace)};
}

std::string trace_to_csv(const LoadTrace& trace) {
  std::ostringstream os;
  os << "cycle,ap_in,load_en,state_hex\n";
  for (const auto& row : trace) {
    os << row.cycle << ',' << int(row.ap_in) << ',' << int(row.load_en) << ',' << row.state.to_hex() << '\n';
  }
  return os.str();
}

}  // namespace topoveil
