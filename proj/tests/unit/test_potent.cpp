#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "topoveil/connectivity.hpp"
#include "topoveil/error.hpp"
#include "topoveil/generators.hpp"
#include "topoveil/optimize.hpp"
#include "topoveil/potent.hpp"
#include "topoveil/simulate.hpp"

using namespace topoveil;

namespace {

ConnectivityMatrix full(std::size_t n) {
  std::vector<std::string> rows, cols{"o"};
  for (std::size_t i = 0; i < n; ++i) rows.push_back("i" + std::to_string(i));
  ConnectivityMatrix m("R", rows, cols);
  for (std::size_t i = 0; i < n; ++i) m.set(i, 0, true);
  return m;
}

Netlist router_for(std::uint64_t seed, int inputs) {
  RandomNetlistOptions o;
  o.inputs = inputs;
  o.outputs = 3;
  o.gates = 30;
  return random_netlist(seed, o);
}

/// Integration over the preserved inputs of a random router.
Integration integrated(const Netlist& n, std::uint64_t correct) {
  const auto m = extract_connectivity(n, grouping_from_ports(n, "R"));
  const auto sw = generate_switch(m);
  return integrate(n, sw, correct % sw.permutations(), m);
}

}  // namespace

TEST_CASE("lehmer order matches next_permutation") {
  for (int n = 1; n <= 6; ++n) {
    const auto ref = oracle::permutations(n);
    REQUIRE(ref.size() == factorial(n));
    for (std::uint64_t k = 0; k < ref.size(); ++k) {
      CHECK(lehmer_permutation(n, k) == ref[k]);
      CHECK(lehmer_rank(ref[k]) == k);
    }
  }
  CHECK_THROWS_AS(lehmer_permutation(3, 6), Error);
  CHECK_THROWS_AS(factorial(21), Error);
}

TEST_CASE("default key width") {
  CHECK(default_key_width(2) == 1);
  CHECK(default_key_width(3) == 3);
  CHECK(default_key_width(4) == 5);
  CHECK(default_key_width(5) == 7);
}

TEST_CASE("n=4, b=5: 24 permutations and 8 ZERO keys") {
  auto sw = generate_switch(full(4), 5);
  CHECK(sw.n() == 4);
  CHECK(sw.key_width == 5);
  std::set<Permutation> seen;
  int zero = 0;
  for (std::uint64_t k = 0; k < 32; ++k) {
    const auto p = apply_key(sw, k);
    if (p) {
      seen.insert(*p);
    } else {
      ++zero;
      CHECK(k >= 24);
    }
  }
  CHECK(seen.size() == 24);
  CHECK(zero == 8);
  CHECK_FALSE(apply_key(sw, 25).has_value());
  CHECK_THROWS_AS(apply_key(sw, 32), Error);
}

TEST_CASE("small switches") {
  const auto two = generate_switch(full(2), 1);
  CHECK(apply_key(two, 0) == Permutation{0, 1});
  CHECK(apply_key(two, 1) == Permutation{1, 0});

  const auto three = generate_switch(full(3), 3);
  CHECK(apply_key(three, 1) == Permutation{0, 2, 1});
  CHECK_FALSE(apply_key(three, 6).has_value());
}

TEST_CASE("correct key is the identity and mapping stays injective") {
  for (int n = 2; n <= 6; ++n) {
    auto sw = generate_switch(full(static_cast<std::size_t>(n)));
    for (std::uint64_t correct : {std::uint64_t{0}, sw.permutations() / 2, sw.permutations() - 1}) {
      sw.correct_key = correct;
      Permutation id(n);
      for (int i = 0; i < n; ++i) id[i] = i;
      CHECK(apply_key(sw, correct) == id);
      std::set<Permutation> seen;
      for (std::uint64_t k = 0; k < sw.permutations(); ++k) seen.insert(*apply_key(sw, k));
      CHECK(seen.size() == sw.permutations());
    }
  }
}

TEST_CASE("switch generation errors") {
  CHECK_THROWS_AS(generate_switch(full(1)), Error);
  CHECK_THROWS_AS(generate_switch(full(4), 4), Error);
  ConnectivityMatrix sparse("R", {"a", "b", "c"}, {"o"});
  sparse.set(0, 0, true);
  sparse.set(2, 0, true);
  const auto sw = generate_switch(sparse);
  CHECK(sw.signals == std::vector<std::string>{"a", "c"});
}

TEST_CASE("correct key gives back the router") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto n = router_for(seed, 4);
    const auto it = integrated(n, seed * 7);
    CHECK(key_width(it.netlist) == it.sw.key_width);
    const auto bound = bind_key(it.netlist, BitString::from_uint(it.sw.correct_key, it.sw.key_width));
    const auto r = check_equivalence(n, bound);
    CHECK(r.equivalent);
    CHECK(r.exhaustive);
  }
}

TEST_CASE("each key applies its permutation; ZERO keys read zeros") {
  const auto n = router_for(3, 3);
  const auto it = integrated(n, 4);
  REQUIRE(it.sw.n() == 3);
  const Simulator plain(n);
  for (std::uint64_t k = 0; k < (1u << it.sw.key_width); ++k) {
    const auto mapping = apply_key(it.sw, k);
    const Simulator locked(bind_key(it.netlist, BitString::from_uint(k, it.sw.key_width)));
    for (std::uint64_t v = 0; v < 8; ++v) {
      const auto in = BitString::from_uint(v, 3);
      BitString routed(3);
      // All three inputs are switched, so signal i is input port i.
      for (int i = 0; i < 3; ++i) routed.set(i, mapping ? in[(*mapping)[i]] : false);
      CHECK(locked.eval(in) == plain.eval(routed));
    }
  }
}

TEST_CASE("updated matrix: switched rows become their union") {
  ConnectivityMatrix m("R", {"i0", "i1", "i2"}, {"o0", "o1"});
  m.set(0, 0, true);
  m.set(1, 1, true);
  const auto n = router_for(1, 3);
  const auto sw = generate_switch(m);
  CHECK(sw.n() == 2);
  const auto it = integrate(n, sw, 1, m);
  CHECK(it.matrix.get("i0", "o0"));
  CHECK(it.matrix.get("i0", "o1"));
  CHECK(it.matrix.get("i1", "o0"));
  CHECK_FALSE(it.matrix.get("i2", "o0"));
}

TEST_CASE("integrate errors") {
  const auto n = router_for(2, 3);
  const auto sw = generate_switch(full(3));
  CHECK_THROWS_AS(integrate(n, sw, 6, full(3)), Error);
  auto ghost = sw;
  ghost.signals[0] = "nope";
  CHECK_THROWS_AS(integrate(n, ghost, 0, full(3)), Error);
  const auto once = integrate(n, sw, 0, full(3));
  CHECK_THROWS_AS(integrate(once.netlist, sw, 0, full(3)), Error);
}

TEST_CASE("key bits survive synthesis") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto n = router_for(seed, 4);
    const auto pre = extract_connectivity(n, grouping_from_ports(n, "R"));
    const auto post_n = synthesize_lite(n);
    const auto post = extract_connectivity(post_n, grouping_from_ports(post_n, "R", true));
    const auto m = merge_connectivity(pre, post);
    const auto sw = generate_switch(m);
    const auto it = integrate(n, sw, 1, m);
    const auto s = synthesize_lite(it.netlist);
    const Port* key = find_input(s, kKeyPort);
    REQUIRE(key != nullptr);
    for (const auto& net : port_nets(*key)) {
      bool read = false;
      for (const auto& c : s.cells) {
        for (const auto& [pin, x] : c.pins) read = read || (pin != output_pin(c.kind) && x == net);
      }
      CHECK(read);
    }
  }
}

TEST_CASE("keyed system and keyspace") {
  auto sw = generate_switch(full(4), 5);
  sw.correct_key = 3;
  CHECK(keyspace(make_system({{"R1", sw}})) == 32);
  CHECK(keyspace(make_system({})) == 1);
  std::vector<ObfuscatedRouter> six;
  for (int i = 6; i >= 1; --i) six.push_back({"R" + std::to_string(i), sw});
  const auto sys = make_system(six);
  CHECK(sys.routers.front().router == "R1");
  CHECK(keyspace(sys) == boost::multiprecision::cpp_int(1) << 30);
  CHECK(sys.key_width() == 30);
  const auto maps = sys.apply(sys.correct_key());
  for (const auto& m : maps) CHECK(m == Permutation{0, 1, 2, 3});
  CHECK_THROWS_AS(sys.apply(BitString(29)), Error);
}

TEST_CASE("three-switch system: wrong keys on two switches") {
  // Three 3-signal switches with correct keys 4, 5, 3 (100, 101, 011).
  std::vector<ObfuscatedRouter> rs;
  const std::uint64_t correct[] = {4, 5, 3};
  for (int i = 0; i < 3; ++i) {
    auto sw = generate_switch(full(3), 3);
    sw.correct_key = correct[i];
    rs.push_back({"S" + std::to_string(i + 1), sw});
  }
  const auto sys = make_system(rs);
  CHECK(sys.correct_key().to_binary() == "100101011");
  const auto wrong = sys.apply(BitString::from_binary("011001011"));
  CHECK(wrong[0] != Permutation{0, 1, 2});
  CHECK(wrong[1] != Permutation{0, 1, 2});
  CHECK(wrong[2] == Permutation{0, 1, 2});
}

TEST_CASE("switch json") {
  auto sw = generate_switch(full(4));
  sw.correct_key = 17;
  const auto text = to_json(sw);
  CHECK(text.find("\"order\": \"lehmer\"") != std::string::npos);
  CHECK(switch_from_json(text) == sw);
}
