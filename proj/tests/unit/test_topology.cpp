#include <doctest.h>

#include "oracles.hpp"
#include "topoveil/error.hpp"
#include "topoveil/generators.hpp"
#include "topoveil/topology.hpp"

using namespace topoveil;

namespace {

Topology two_ips() {
  Topology t("pair");
  t.add_node({"R", NodeKind::Router, 2, 2});
  t.add_node({"A", NodeKind::IP, 1, 1});
  t.add_node({"B", NodeKind::IP, 1, 1});
  t.add_link({"A", 0}, {"R", 0});
  t.add_link({"B", 0}, {"R", 1});
  t.add_link({"R", 0}, {"A", 0});
  t.add_link({"R", 1}, {"B", 0});
  return t;
}

}  // namespace

TEST_CASE("built-in topologies are functional") {
  CHECK(validate(example_tree_soc()).functional());
  CHECK(validate(star_topology(4)).functional());
  CHECK(validate(two_ips()).functional());
}

TEST_CASE("validate names each fault") {
  auto t = two_ips();
  t.remove_link({{"R", 1}, {"B", 0}});
  auto rep = validate(t);
  CHECK(rep.contains(Finding::Kind::DanglingOut, {"R", 1}));
  CHECK(rep.contains(Finding::Kind::DanglingIn, {"B", 0}));
  CHECK(rep.structurally_sound());

  t.add_link({"R", 0}, {"B", 0});
  rep = validate(t);
  CHECK(rep.contains(Finding::Kind::MultiDriving, {"R", 0}));

  auto u = two_ips();
  u.add_link({"Q", 0}, {"R", 0});
  u.add_link({"A", 3}, {"B", 0});
  rep = validate(u);
  CHECK(rep.contains(Finding::Kind::UnknownNode, {"Q", 0}));
  CHECK(rep.contains(Finding::Kind::PortOutOfRange, {"A", 3}));
  CHECK(rep.contains(Finding::Kind::MultiDriven, {"R", 0}));
  CHECK_FALSE(rep.structurally_sound());
}

TEST_CASE("validate agrees with the reference on random mutations") {
  SplitMix64 rng(77);
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto t = random_topology(seed);
    CHECK(oracle::functional(t));
    CHECK(validate(t).functional());
    // Rewire one link's source; the result is functional only if nothing moved.
    const auto links = t.links();
    const auto& l = links[rng.below(links.size())];
    const auto& other = links[rng.below(links.size())];
    t.remove_link(l);
    t.add_link(other.src, l.dst);
    CHECK(validate(t).functional() == oracle::functional(t));
  }
}

TEST_CASE("degree signature, legality and classification") {
  const auto t = two_ips();
  const auto sig = degree_signature(t);
  CHECK(sig.at("R") == Degree{2, 2});
  CHECK(sig.at("A") == Degree{1, 1});

  auto swapped = t;
  swapped.remove_link({{"R", 0}, {"A", 0}});
  swapped.remove_link({{"R", 1}, {"B", 0}});
  swapped.add_link({"R", 0}, {"B", 0});
  swapped.add_link({"R", 1}, {"A", 0});
  CHECK(is_legal(swapped, t));
  CHECK(classify(t, t) == TopologyClass::Intended);
  CHECK(classify(swapped, t) == TopologyClass::LegalAlternate);

  auto broken = t;
  broken.remove_link({{"R", 0}, {"A", 0}});
  CHECK(classify(broken, t) == TopologyClass::NonFunctional);
  CHECK_THROWS_AS(degree_signature(broken), Error);

  auto stranger = t;
  stranger.add_node({"C", NodeKind::IP, 0, 0});
  CHECK_THROWS_AS(is_legal(stranger, t), Error);
}

TEST_CASE("equality and digest ignore label and insertion order") {
  auto a = two_ips();
  Topology b("other");
  for (const auto& [id, n] : a.nodes()) b.add_node(n);
  auto links = a.links();
  for (auto it = links.rbegin(); it != links.rend(); ++it) b.add_link(*it);
  CHECK(topology_equal(a, b));
  CHECK(topology_digest(a) == topology_digest(b));
  b.remove_link(links[0]);
  CHECK_FALSE(topology_equal(a, b));
  CHECK(topology_digest(a) != topology_digest(b));
}

TEST_CASE("json round trip") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto t = random_topology(seed);
    const auto text = to_json(t);
    const auto back = topology_from_json(text);
    CHECK(topology_equal(t, back));
    CHECK(back.label() == t.label());
    CHECK(to_json(back) == text);
  }
  CHECK_THROWS_AS(topology_from_json("{"), Error);
  CHECK_THROWS_AS(topology_from_json(R"({"label":"x"})"), Error);
}

TEST_CASE("dot export lists every link") {
  const auto t = example_tree_soc();
  const auto dot = to_dot(t);
  CHECK(dot.rfind("digraph", 0) == 0);
  CHECK(dot.find("\"R1\" -> \"IP6\"") != std::string::npos);
}

TEST_CASE("random topologies stay within bounds") {
  RandomTopologyOptions o;
  o.max_routers = 6;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto t = random_topology(seed, o);
    const auto routers = t.router_ids().size();
    CHECK(routers >= 2);
    CHECK(routers <= 6);
    CHECK(topology_equal(t, random_topology(seed, o)));
  }
}
