#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>

namespace topoveil {

/// splitmix64 generator. Fully specified so that seeded shuffles are
/// reproducible bit-for-bit in any implementation.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Value in [0, bound). Plain modulo reduction; the bias is irrelevant at
  /// the bounds used here and keeps the stream trivially portable.
  std::uint64_t below(std::uint64_t bound) noexcept { return next() % bound; }

  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() noexcept { return next(); }

 private:
  std::uint64_t state_;
};

/// Fisher-Yates: for i = n-1 down to 1, swap(i, below(i+1)).
template <typename T>
void fisher_yates(std::span<T> items, SplitMix64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

/// FNV-1a 64-bit, used for canonical-form digests.
inline std::uint64_t fnv1a64(std::string_view data,
                             std::uint64_t hash = 0xcbf29ce484222325ULL) noexcept {
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace topoveil
