#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace topoveil {

/// Ordered bit sequence. Index 0 is the first (most significant) bit; integer
/// conversions treat the string as an MSB-first binary number.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t width, bool value = false) : bits_(width, value ? 1 : 0) {}

  static BitString from_uint(std::uint64_t value, std::size_t width);
  static BitString from_binary(std::string_view text);
  /// Parses hex digits into `width` bits. Excess high-order bits must be zero.
  static BitString from_hex(std::string_view hex, std::size_t width);

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  bool at(std::size_t i) const;
  void set(std::size_t i, bool v) { bits_[i] = v ? 1 : 0; }
  void push_back(bool v) { bits_.push_back(v ? 1 : 0); }
  void append(const BitString& other);

  BitString slice(std::size_t offset, std::size_t length) const;
  /// MSB-first integer value of bits [offset, offset+length). length <= 64.
  std::uint64_t slice_uint(std::size_t offset, std::size_t length) const;
  std::uint64_t to_uint() const { return slice_uint(0, size()); }
  void write_uint(std::size_t offset, std::size_t length, std::uint64_t value);

  std::string to_binary() const;
  /// ceil(size/4) hex digits, zero-padded on the left.
  std::string to_hex() const;

  auto operator<=>(const BitString&) const = default;
  bool operator==(const BitString&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// Two-line key file: decimal bit length, then MSB-first hex.
std::string format_key_file(const BitString& bits);
BitString parse_key_file(std::string_view text);

}  // namespace topoveil
