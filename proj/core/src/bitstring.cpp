#include "topoveil/bitstring.hpp"

#include <sstream>
#include <stdexcept>

#include "topoveil/error.hpp"

namespace topoveil {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidTopology: return "InvalidTopology";
    case ErrorCode::NodeSetMismatch: return "NodeSetMismatch";
    case ErrorCode::RouterNotFound: return "RouterNotFound";
    case ErrorCode::DegreeTooSmall: return "DegreeTooSmall";
    case ErrorCode::BadStages: return "BadStages";
    case ErrorCode::KeyLengthMismatch: return "KeyLengthMismatch";
    case ErrorCode::KeyspaceTooLarge: return "KeyspaceTooLarge";
    case ErrorCode::BadExtension: return "BadExtension";
    case ErrorCode::ZeroWidth: return "ZeroWidth";
    case ErrorCode::WidthMismatch: return "WidthMismatch";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::MultiDriverError: return "MultiDriverError";
    case ErrorCode::CombLoopError: return "CombLoopError";
    case ErrorCode::UnknownSignal: return "UnknownSignal";
    case ErrorCode::RouterMismatch: return "RouterMismatch";
    case ErrorCode::KeyWidthTooSmall: return "KeyWidthTooSmall";
    case ErrorCode::TooFewSignals: return "TooFewSignals";
    case ErrorCode::KeyOutOfRange: return "KeyOutOfRange";
    case ErrorCode::SequentialNetlist: return "SequentialNetlist";
    case ErrorCode::BudgetExhausted: return "BudgetExhausted";
    case ErrorCode::UnsatFromStart: return "UnsatFromStart";
    case ErrorCode::OracleMismatch: return "OracleMismatch";
    case ErrorCode::NonFunctionalTopology: return "NonFunctionalTopology";
    case ErrorCode::WorkloadMismatch: return "WorkloadMismatch";
    case ErrorCode::WorkloadCoverage: return "WorkloadCoverage";
    case ErrorCode::LevelExceedsRouters: return "LevelExceedsRouters";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

BitString BitString::from_uint(std::uint64_t value, std::size_t width) {
  BitString b(width);
  b.write_uint(0, width, value);
  return b;
}

BitString BitString::from_binary(std::string_view text) {
  BitString b;
  for (char c : text) {
    if (c == '0' || c == '1') {
      b.push_back(c == '1');
    } else {
      throw Error(ErrorCode::ParseError, "invalid binary digit '" + std::string(1, c) + "'");
    }
  }
  return b;
}

BitString BitString::from_hex(std::string_view hex, std::size_t width) {
  BitString all;
  for (char c : hex) {
    int v;
    if (c >= '0' && c <= '9') {
      v = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      v = c - 'a' + 10;
    } else if (c >= 'A' && c <= 'F') {
      v = c - 'A' + 10;
    } else {
      throw Error(ErrorCode::ParseError, "invalid hex digit '" + std::string(1, c) + "'");
    }
    for (int s = 3; s >= 0; --s) all.push_back(((v >> s) & 1) != 0);
  }
  if (all.size() < width) {
    BitString padded(width - all.size());
    padded.append(all);
    return padded;
  }
  const std::size_t excess = all.size() - width;
  for (std::size_t i = 0; i < excess; ++i) {
    if (all[i]) throw Error(ErrorCode::ParseError, "hex value exceeds declared bit length");
  }
  return all.slice(excess, width);
}

bool BitString::at(std::size_t i) const {
  if (i >= size()) throw std::out_of_range("BitString::at");
  return bits_[i] != 0;
}

void BitString::append(const BitString& other) {
  bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
}

BitString BitString::slice(std::size_t offset, std::size_t length) const {
  if (offset + length > size()) throw std::out_of_range("BitString::slice");
  BitString out;
  out.bits_.assign(bits_.begin() + static_cast<std::ptrdiff_t>(offset),
                   bits_.begin() + static_cast<std::ptrdiff_t>(offset + length));
  return out;
}

std::uint64_t BitString::slice_uint(std::size_t offset, std::size_t length) const {
  if (length > 64) throw std::invalid_argument("slice_uint: length > 64");
  if (offset + length > size()) throw std::out_of_range("BitString::slice_uint");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < length; ++i) v = (v << 1) | bits_[offset + i];
  return v;
}

void BitString::write_uint(std::size_t offset, std::size_t length, std::uint64_t value) {
  if (offset + length > size()) throw std::out_of_range("BitString::write_uint");
  for (std::size_t i = 0; i < length; ++i) {
    const std::size_t shift = length - 1 - i;
    bits_[offset + i] = shift < 64 ? static_cast<std::uint8_t>((value >> shift) & 1U) : 0;
  }
}

std::string BitString::to_binary() const {
  std::string s;
  s.reserve(size());
  for (auto b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

std::string BitString::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  const std::size_t digits = (size() + 3) / 4;
  const std::size_t pad = digits * 4 - size();
  std::string out;
  out.reserve(digits);
  int acc = 0;
  for (std::size_t i = 0; i < digits * 4; ++i) {
    const bool bit = i >= pad && bits_[i - pad] != 0;
    acc = (acc << 1) | (bit ? 1 : 0);
    if (i % 4 == 3) {
      out.push_back(kDigits[acc]);
      acc = 0;
    }
  }
  return out;
}

std::string format_key_file(const BitString& bits) {
  return std::to_string(bits.size()) + "\n" + bits.to_hex() + "\n";
}

BitString parse_key_file(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string len_line, hex_line;
  if (!std::getline(in, len_line)) throw Error(ErrorCode::ParseError, "key file: missing length line");
  std::getline(in, hex_line);
  auto trim = [](std::string& s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
    while (!s.empty() && s.front() == ' ') s.erase(s.begin());
  };
  trim(len_line);
  trim(hex_line);
  std::size_t width = 0;
  try {
    std::size_t pos = 0;
    width = std::stoul(len_line, &pos);
    if (pos != len_line.size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, "key file: bad length '" + len_line + "'");
  }
  if (hex_line.size() != (width + 3) / 4) {
    throw Error(ErrorCode::ParseError, "key file: expected " + std::to_string((width + 3) / 4) +
                                           " hex digits, got " + std::to_string(hex_line.size()));
  }
  return BitString::from_hex(hex_line, width);
}

}  // namespace topoveil
