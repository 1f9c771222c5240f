#include <doctest.h>

#include <set>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "topoveil/error.hpp"
#include "topoveil/generators.hpp"
#include "topoveil/obnocs.hpp"

using namespace topoveil;

TEST_CASE("select width") {
  CHECK(select_width(1) == 1);
  CHECK(select_width(2) == 1);
  CHECK(select_width(3) == 2);
  CHECK(select_width(4) == 2);
  CHECK(select_width(5) == 3);
  CHECK(select_width(16) == 4);
}

TEST_CASE("star router: four 4:1 lanes, AP restores the topology") {
  const auto ob = fixtures::star4();
  const auto& d = ob.design;
  CHECK(d.lane_count() == 4);
  CHECK(d.key_length == 8);
  CHECK(ob.activation_package.size() == 8);
  for (const auto& g : d.groups) {
    for (const auto& lane : g.lanes) {
      CHECK(lane.width == 2);
      CHECK(lane.candidates.size() == 4);
    }
  }
  CHECK(topology_equal(induce_topology(d, ob.activation_package), star_topology(4)));
}

TEST_CASE("induce matches the lane-decoding reference for every key") {
  const auto ob = fixtures::star4();
  for (std::uint64_t k = 0; k < 256; ++k) {
    const auto key = BitString::from_uint(k, 8);
    const auto t = induce_topology(ob.design, key);
    const std::set<Link> got(t.links().begin(), t.links().end());
    CHECK(got == oracle::induced_links(ob.design, key));
  }
}

TEST_CASE("legal count 4! and (4!)^2") {
  const auto one = fixtures::star4(1);
  auto c = count_legal(one.design);
  CHECK(c.enumerated == 24);
  CHECK(c.formula == 24);
  CHECK(c.exhaustive);
  CHECK(c.keys_visited == 256);

  const auto two = fixtures::star4(2);
  CHECK(two.design.key_length == 16);
  c = count_legal(two.design);
  CHECK(c.enumerated == 576);
  CHECK(c.formula == 576);
}

TEST_CASE("enumeration classes match the reference") {
  const auto ob = fixtures::star4();
  const auto intended = star_topology(4);
  std::size_t intended_count = 0, legal = 0;
  for (const auto& r : enumerate_keys(ob.design, &intended)) {
    const auto t = induce_topology(ob.design, r.key);
    const bool func = oracle::functional(t);
    CHECK((r.cls != TopologyClass::NonFunctional) == func);
    if (r.cls == TopologyClass::Intended) {
      ++intended_count;
      CHECK(r.key == ob.activation_package);
    }
    if (func) ++legal;
  }
  CHECK(intended_count == 1);
  CHECK(legal == 24);
}

TEST_CASE("enumeration is thread-count independent") {
  const auto ob = fixtures::star4(2);
  EnumerateOptions a, b;
  a.threads = 1;
  b.threads = 7;
  const auto ca = count_legal(ob.design, a);
  const auto cb = count_legal(ob.design, b);
  CHECK(ca.enumerated == cb.enumerated);
  CHECK(ca.keys_visited == cb.keys_visited);
}

TEST_CASE("full tree redaction: sixteen 4:1 muxes, 32-bit AP") {
  const auto ob = fixtures::tree_full();
  CHECK(ob.design.lane_count() == 16);
  CHECK(ob.design.key_length == 32);
  CHECK(topology_equal(induce_topology(ob.design, ob.activation_package), example_tree_soc()));
  CHECK(legal_formula(ob.design) == 24 * 24 * 24 * 24);
}

TEST_CASE("round trip on random topologies, both stage counts") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto t = random_topology(seed);
    std::set<NodeId> routers;
    for (const auto& r : t.router_ids()) {
      if (t.out_links(r).size() >= 2) routers.insert(r);
    }
    for (int stages : {1, 2}) {
      InsertOptions o;
      o.stages = stages;
      o.seed = seed;
      const auto ob = insert_switches(t, routers, o);
      CHECK(ob.activation_package.size() == ob.design.key_length);
      CHECK(topology_equal(induce_topology(ob.design, ob.activation_package), t));
    }
  }
}

TEST_CASE("seed controls wiring; no-shuffle keeps candidates sorted") {
  const auto t = example_tree_soc();
  InsertOptions a;
  a.seed = 1;
  const auto x = insert_switches(t, {"R1"}, a);
  const auto y = insert_switches(t, {"R1"}, a);
  CHECK(x.design == y.design);
  CHECK(x.activation_package == y.activation_package);

  bool differs = false;
  for (std::uint64_t s = 2; s < 12 && !differs; ++s) {
    a.seed = s;
    differs = insert_switches(t, {"R1"}, a).activation_package != x.activation_package;
  }
  CHECK(differs);

  InsertOptions plain;
  plain.shuffle = false;
  const auto z = insert_switches(t, {"R1"}, plain);
  for (const auto& g : z.design.groups) {
    for (const auto& lane : g.lanes) CHECK(std::is_sorted(lane.candidates.begin(), lane.candidates.end()));
  }
}

TEST_CASE("insert_switches errors") {
  const auto t = example_tree_soc();
  InsertOptions o;
  CHECK_THROWS_AS(insert_switches(t, {"R9"}, o), Error);
  CHECK_THROWS_AS(insert_switches(t, {"R2"}, o), Error);  // one out-link
  o.stages = 3;
  CHECK_THROWS_AS(insert_switches(t, {"R1"}, o), Error);
  try {
    insert_switches(t, {"R2"});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegreeTooSmall);
  }
}

TEST_CASE("extensions widen the demux lanes") {
  const auto t = example_tree_soc();
  InsertOptions o;
  o.extensions["R1"] = {Endpoint{"R2", 0}};
  const auto ob = insert_switches(t, {"R1"}, o);
  for (const auto& g : ob.design.groups) {
    for (const auto& lane : g.lanes) {
      CHECK(lane.candidates.size() == 5);
      CHECK(lane.width == 3);
    }
  }
  CHECK(topology_equal(induce_topology(ob.design, ob.activation_package), t));
  o.extensions["R1"] = {Endpoint{"R7", 0}};
  CHECK_THROWS_AS(insert_switches(t, {"R1"}, o), Error);
}

TEST_CASE("recover_key_for inverts induce") {
  const auto ob = fixtures::tree_full();
  const auto k = recover_key_for(ob.design, example_tree_soc());
  REQUIRE(k.has_value());
  CHECK(topology_equal(induce_topology(ob.design, *k), example_tree_soc()));

  SplitMix64 rng(4);
  const auto small = fixtures::star4();
  for (int i = 0; i < 50; ++i) {
    const auto key = oracle::random_bits(rng, small.design.key_length);
    const auto t = induce_topology(small.design, key);
    const auto back = recover_key_for(small.design, t);
    REQUIRE(back.has_value());
    CHECK(topology_equal(induce_topology(small.design, *back), t));
  }

  auto foreign = star_topology(4);
  foreign.add_link({"A", 0}, {"B", 0});
  CHECK_FALSE(recover_key_for(small.design, foreign).has_value());
}

TEST_CASE("lane codes read the key lane by lane") {
  const auto ob = fixtures::star4();
  const auto codes = lane_codes(ob.design, BitString::from_binary("00011011"));
  CHECK(codes == std::vector<std::uint64_t>{0, 1, 2, 3});
  CHECK_THROWS_AS(lane_codes(ob.design, BitString(7)), Error);
  CHECK_THROWS_AS(induce_topology(ob.design, BitString(9)), Error);
}

TEST_CASE("sampling beyond the cap") {
  const auto ob = fixtures::tree_full();
  EnumerateOptions o;
  o.cap_bits = 16;
  CHECK_THROWS_AS(count_legal(ob.design, o), Error);
  o.samples = 500;
  o.seed = 9;
  const auto c = count_legal(ob.design, o);
  CHECK_FALSE(c.exhaustive);
  CHECK(c.keys_visited == 500);
  CHECK(c.enumerated <= 500);
  CHECK(count_legal(ob.design, o).enumerated == c.enumerated);
}

TEST_CASE("design json round trip") {
  const auto ob = fixtures::star4(2);
  const auto text = to_json(ob.design);
  const auto back = design_from_json(text);
  CHECK(back == ob.design);
  CHECK(to_json(back) == text);
  CHECK_THROWS_AS(design_from_json("[]"), Error);
}
