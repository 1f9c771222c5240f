#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "topoveil/bitstring.hpp"
#include "topoveil/connectivity.hpp"
#include "topoveil/netlist.hpp"

namespace topoveil {

/// perm[i] is the input signal routed to output position i.
using Permutation = std::vector<int>;

/// n! for n <= 20.
std::uint64_t factorial(int n);

/// k-th permutation of {0..n-1} in lexicographic order, decoded from the
/// factorial number system. Throws KeyOutOfRange for k >= n!.
Permutation lehmer_permutation(int n, std::uint64_t k);
std::uint64_t lehmer_rank(const Permutation& p);

/// ceil(log2 n!), at least 1.
int default_key_width(std::size_t n);

/// Keyed permutation switch. Key k < n! selects P_k composed with the
/// inverse of P_correct, so the correct key is the identity; keys >= n! are
/// ZERO.
struct ObfSwitch {
  std::vector<std::string> signals;
  int key_width = 1;
  std::uint64_t correct_key = 0;

  std::size_t n() const noexcept { return signals.size(); }
  std::uint64_t permutations() const { return factorial(static_cast<int>(signals.size())); }
  bool operator==(const ObfSwitch&) const = default;
};

/// Signals are the rows of m_final with any true entry, in row order.
/// Throws TooFewSignals (n < 2) or KeyWidthTooSmall (2^b < n!).
ObfSwitch generate_switch(const ConnectivityMatrix& m_final, std::optional<int> key_width = std::nullopt);

/// The mapping under `key`, or nullopt for ZERO. Throws KeyOutOfRange when
/// key >= 2^key_width.
std::optional<Permutation> apply_key(const ObfSwitch& s, std::uint64_t key);

struct Integration {
  Netlist netlist;
  ConnectivityMatrix matrix;
  ObfSwitch sw;
};

/// Inserts the switch in front of the router logic: every switched input
/// port is replaced, bit by bit, by a MUX2 tree over the new "key" port
/// whose leaves are the permuted inputs (narrower signals pad with zero,
/// ZERO keys select CONST0). A switched row of the updated matrix becomes
/// the union of all switched rows: reachable under some key. Throws
/// UnknownSignal, KeyOutOfRange, or SchemaError if the router already has a
/// key port.
Integration integrate(const Netlist& router, const ObfSwitch& s, std::uint64_t correct_key,
                      const ConnectivityMatrix& m_final);

struct ObfuscatedRouter {
  NodeId router;
  ObfSwitch sw;  // sw.correct_key is the router's key
};

/// Routers in canonical (id) order; key segments concatenate in that order.
struct KeyedSystem {
  std::vector<ObfuscatedRouter> routers;

  std::size_t key_width() const;
  BitString correct_key() const;
  /// Per-router mapping (nullopt = ZERO). Throws KeyLengthMismatch.
  std::vector<std::optional<Permutation>> apply(const BitString& key) const;
};

KeyedSystem make_system(std::vector<ObfuscatedRouter> routers);

/// 2^(sum of key widths).
boost::multiprecision::cpp_int keyspace(const KeyedSystem& sys);

std::string to_json(const ObfSwitch& s);
ObfSwitch switch_from_json(std::string_view text);

}  // namespace topoveil
