#include "topoveil/potent.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "json_io.hpp"
#include "topoveil/error.hpp"

namespace topoveil {

std::uint64_t factorial(int n) {
  if (n < 0 || n > 20) throw Error(ErrorCode::KeyOutOfRange, "factorial of " + std::to_string(n));
  std::uint64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

Permutation lehmer_permutation(int n, std::uint64_t k) {
  if (k >= factorial(n)) throw Error(ErrorCode::KeyOutOfRange, "permutation index " + std::to_string(k));
  std::vector<int> pool(n);
  for (int i = 0; i < n; ++i) pool[i] = i;
  Permutation p;
  for (int i = n; i >= 1; --i) {
    const std::uint64_t f = factorial(i - 1);
    const auto digit = static_cast<std::size_t>(k / f);
    k %= f;
    p.push_back(pool[digit]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(digit));
  }
  return p;
}

std::uint64_t lehmer_rank(const Permutation& p) {
  const int n = static_cast<int>(p.size());
  std::uint64_t rank = 0;
  for (int i = 0; i < n; ++i) {
    std::uint64_t smaller = 0;
    for (int j = i + 1; j < n; ++j) smaller += p[j] < p[i] ? 1 : 0;
    rank += smaller * factorial(n - 1 - i);
  }
  return rank;
}

int default_key_width(std::size_t n) {
  const std::uint64_t f = factorial(static_cast<int>(n));
  int b = 1;
  while (b < 64 && (std::uint64_t{1} << b) < f) ++b;
  return b;
}

ObfSwitch generate_switch(const ConnectivityMatrix& m_final, std::optional<int> key_width) {
  ObfSwitch s;
  for (std::size_t r = 0; r < m_final.rows().size(); ++r) {
    if (m_final.row_any(r)) s.signals.push_back(m_final.rows()[r]);
  }
  if (s.n() < 2) {
    throw Error(ErrorCode::TooFewSignals, std::to_string(s.n()) + " preserved signal(s) on " + m_final.router());
  }
  if (s.n() > 20) throw Error(ErrorCode::KeyWidthTooSmall, "more than 20 signals");
  s.key_width = key_width.value_or(default_key_width(s.n()));
  if (s.key_width < 1 || s.key_width > 63 || (std::uint64_t{1} << s.key_width) < s.permutations()) {
    throw Error(ErrorCode::KeyWidthTooSmall, "2^" + std::to_string(s.key_width) + " < " +
                                                 std::to_string(s.n()) + "!");
  }
  return s;
}

std::optional<Permutation> apply_key(const ObfSwitch& s, std::uint64_t key) {
  if (s.key_width < 64 && key >= (std::uint64_t{1} << s.key_width)) {
    throw Error(ErrorCode::KeyOutOfRange, "key " + std::to_string(key) + " needs more than " +
                                              std::to_string(s.key_width) + " bits");
  }
  const int n = static_cast<int>(s.n());
  if (key >= s.permutations()) return std::nullopt;
  const Permutation pk = lehmer_permutation(n, key);
  const Permutation pc = lehmer_permutation(n, s.correct_key);
  Permutation inv(n);
  for (int i = 0; i < n; ++i) inv[pc[i]] = i;
  Permutation m(n);
  for (int i = 0; i < n; ++i) m[i] = pk[inv[i]];
  return m;
}

Integration integrate(const Netlist& router, const ObfSwitch& sw, std::uint64_t correct_key,
                      const ConnectivityMatrix& m_final) {
  if (find_input(router, kKeyPort) != nullptr) {
    throw Error(ErrorCode::SchemaError, router.name + " already has a key port");
  }
  if (correct_key >= sw.permutations()) {
    throw Error(ErrorCode::KeyOutOfRange, "correct key " + std::to_string(correct_key) + " >= n!");
  }
  ObfSwitch s = sw;
  s.correct_key = correct_key;
  const int n = static_cast<int>(s.n());

  std::vector<Port> ports;
  for (const auto& name : s.signals) {
    const Port* p = find_input(router, name);
    if (p == nullptr) throw Error(ErrorCode::UnknownSignal, name + " is not an input of " + router.name);
    ports.push_back(*p);
  }

  // Original logic reads "<net>$sw" instead of the switched input nets.
  std::map<std::string, std::string> renamed;
  for (const auto& p : ports) {
    for (const auto& net : port_nets(p)) renamed[net] = net + "$sw";
  }
  Netlist base = router;
  for (auto& c : base.cells) {
    for (auto& [pin, net] : c.pins) {
      if (pin == output_pin(c.kind)) continue;
      if (auto it = renamed.find(net); it != renamed.end()) net = it->second;
    }
  }
  NetlistBuilder b(std::move(base));
  const auto key = b.add_input(std::string(kKeyPort), s.key_width);

  std::vector<Permutation> maps;
  const std::uint64_t leaves = std::uint64_t{1} << s.key_width;
  for (std::uint64_t k = 0; k < std::min<std::uint64_t>(leaves, s.permutations()); ++k) {
    maps.push_back(*apply_key(s, k));
  }
  std::string zero;
  auto zero_net = [&]() -> const std::string& {
    if (zero.empty()) zero = b.const0("sw$zero");
    return zero;
  };
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < ports[i].width; ++t) {
      std::vector<std::string> level;
      for (std::uint64_t k = 0; k < leaves; ++k) {
        if (k >= maps.size()) {
          level.push_back(zero_net());
          continue;
        }
        const Port& src = ports[maps[k][i]];
        level.push_back(t < src.width ? port_bit_net(src, t) : zero_net());
      }
      for (int l = 0; l < s.key_width; ++l) {
        const std::string& sel = key[s.key_width - 1 - l];
        const bool top = l + 1 == s.key_width;
        std::vector<std::string> next;
        for (std::size_t j = 0; j < level.size(); j += 2) {
          next.push_back(b.mux(level[j], level[j + 1], sel, top ? renamed[port_bit_net(ports[i], t)] : std::string{}));
        }
        level = std::move(next);
      }
    }
  }

  ConnectivityMatrix m = m_final;
  std::vector<std::size_t> switched;
  for (const auto& name : s.signals) {
    if (auto r = m.row_index(name)) switched.push_back(*r);
  }
  for (std::size_t c = 0; c < m.cols().size(); ++c) {
    bool any = false;
    for (auto r : switched) any = any || m_final.at(r, c);
    for (auto r : switched) m.set(r, c, any);
  }
  return Integration{std::move(b).build(), std::move(m), std::move(s)};
}

std::size_t KeyedSystem::key_width() const {
  std::size_t w = 0;
  for (const auto& r : routers) w += static_cast<std::size_t>(r.sw.key_width);
  return w;
}

BitString KeyedSystem::correct_key() const {
  BitString k;
  for (const auto& r : routers) k.append(BitString::from_uint(r.sw.correct_key, r.sw.key_width));
  return k;
}

std::vector<std::optional<Permutation>> KeyedSystem::apply(const BitString& key) const {
  if (key.size() != key_width()) {
    throw Error(ErrorCode::KeyLengthMismatch, "system key has " + std::to_string(key.size()) +
                                                  " bits, expected " + std::to_string(key_width()));
  }
  std::vector<std::optional<Permutation>> out;
  std::size_t off = 0;
  for (const auto& r : routers) {
    out.push_back(apply_key(r.sw, key.slice_uint(off, r.sw.key_width)));
    off += r.sw.key_width;
  }
  return out;
}

KeyedSystem make_system(std::vector<ObfuscatedRouter> routers) {
  std::sort(routers.begin(), routers.end(),
            [](const ObfuscatedRouter& a, const ObfuscatedRouter& b) { return a.router < b.router; });
  return KeyedSystem{std::move(routers)};
}

boost::multiprecision::cpp_int keyspace(const KeyedSystem& sys) {
  boost::multiprecision::cpp_int k = 1;
  k <<= sys.key_width();
  return k;
}

std::string to_json(const ObfSwitch& s) {
  detail::json j = {{"signals", s.signals},
                    {"key_width", s.key_width},
                    {"correct_key", s.correct_key},
                    {"order", "lehmer"}};
  return detail::dump(j);
}

ObfSwitch switch_from_json(std::string_view text) {
  using detail::get_field;
  const auto j = detail::parse_json(text, "switch");
  if (get_field<std::string>(j, "order", "switch") != "lehmer") {
    throw Error(ErrorCode::SchemaError, "switch: only lehmer order is supported");
  }
  ObfSwitch s;
  s.signals = get_field<std::vector<std::string>>(j, "signals", "switch");
  s.key_width = get_field<int>(j, "key_width", "switch");
  s.correct_key = get_field<std::uint64_t>(j, "correct_key", "switch");
  if (s.n() < 2) throw Error(ErrorCode::TooFewSignals, "switch: fewer than two signals");
  if (s.n() > 20 || s.key_width < 1 || s.key_width > 63 || (std::uint64_t{1} << s.key_width) < s.permutations()) {
    throw Error(ErrorCode::KeyWidthTooSmall, "switch: key width");
  }
  if (s.correct_key >= s.permutations()) throw Error(ErrorCode::KeyOutOfRange, "switch: correct key");
  return s;
}

}  // namespace topoveil
