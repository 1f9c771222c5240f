#include <doctest.h>

#include <set>
#include <thread>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "topoveil/attack.hpp"
#include "topoveil/connectivity.hpp"
#include "topoveil/elaborate.hpp"
#include "topoveil/error.hpp"
#include "topoveil/generators.hpp"
#include "topoveil/potent.hpp"
#include "topoveil/simulate.hpp"

using namespace topoveil;

namespace {

/// Functional-equivalence check of two keys by brute force over all inputs.
bool same_function(const Netlist& locked, const BitString& a, const BitString& b) {
  return check_equivalence(bind_key(locked, a), bind_key(locked, b)).equivalent;
}

}  // namespace

TEST_CASE("one-bit lock falls in at most two DIPs") {
  const auto lock = fixtures::one_bit_lock();
  for (std::uint64_t k : {0, 1}) {
    ExactOracle o(lock, BitString::from_uint(k, 1));
    const auto r = sat_attack(lock, o);
    CHECK(r.dip_count <= 2);
    CHECK(r.recovered_key.to_uint() == k);
    CHECK(r.oracle_queries == r.dip_count);
  }
}

TEST_CASE("exact oracle: recovered key is equivalent, DIPs bounded") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const int k = 2 + static_cast<int>(seed % 7);
    const auto lock = fixtures::random_lock(seed, k);
    SplitMix64 rng(seed + 100);
    const auto correct = oracle::random_bits(rng, static_cast<std::size_t>(k));
    ExactOracle o(lock, correct);
    AttackOptions opts;
    opts.seed = seed;
    const auto r = sat_attack(lock, o, opts);
    CHECK(r.dip_count <= (std::uint64_t{1} << k));
    CHECK(same_function(lock, r.recovered_key, correct));

    // Every key equivalent to the correct one survives brute force.
    const auto bf = brute_force_attack(lock, o);
    for (const auto& key : bf.consistent_keys) CHECK(same_function(lock, key, correct));
    CHECK(std::find(bf.consistent_keys.begin(), bf.consistent_keys.end(), correct) != bf.consistent_keys.end());
  }
}

TEST_CASE("attack is deterministic for a seed") {
  const auto lock = fixtures::random_lock(9, 6);
  const auto correct = BitString::from_uint(37, 6);
  ExactOracle a(lock, correct), b(lock, correct);
  AttackOptions opts;
  opts.seed = 3;
  const auto x = sat_attack(lock, a, opts);
  const auto y = sat_attack(lock, b, opts);
  CHECK(x.recovered_key == y.recovered_key);
  CHECK(x.dips == y.dips);
}

TEST_CASE("budget and missing key") {
  const auto lock = fixtures::random_lock(4, 8);
  ExactOracle o(lock, BitString::from_uint(200, 8));
  AttackOptions opts;
  opts.budget = 0;
  try {
    sat_attack(lock, o, opts);
    FAIL("expected BudgetExhausted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BudgetExhausted);
  }
  const auto plain = random_netlist(1);
  ExactOracle p(plain, BitString{});
  CHECK_THROWS_AS(sat_attack(plain, p), Error);
}

TEST_CASE("oracle query count is exact under concurrency") {
  const auto lock = fixtures::random_lock(2, 4);
  ExactOracle o(lock, BitString::from_uint(5, 4));
  {
    std::vector<std::jthread> pool;
    for (int t = 0; t < 8; ++t) {
      pool.emplace_back([&o, t] {
        SplitMix64 rng(static_cast<std::uint64_t>(t));
        for (int i = 0; i < 250; ++i) o.query(oracle::random_bits(rng, 6));
      });
    }
  }
  CHECK(o.queries() == 2000);
}

TEST_CASE("obnocs: exact oracle recovers the intended topology") {
  const auto ob = fixtures::star4();
  const auto locked = elaborate(ob.design);
  ExactOracle o(locked, ob.activation_package);
  auto r = sat_attack(locked, o);
  const auto gt = obnocs_ground_truth(ob.design, ob.activation_package);
  evaluate(r, locked, gt);
  CHECK(r.verdict == Verdict::FunctionalEquivalent);
  CHECK(r.recovered_key == ob.activation_package);
  CHECK(r.phi_digest == topology_digest(star_topology(4)));
}

TEST_CASE("obnocs: behavioral oracle accepts every legal key") {
  const auto ob = fixtures::star4();
  const auto locked = elaborate(ob.design);
  const auto intended = star_topology(4);
  std::vector<BitString> legal;
  for (const auto& rec : enumerate_keys(ob.design, &intended)) {
    if (rec.cls != TopologyClass::NonFunctional) legal.push_back(rec.key);
  }
  REQUIRE(legal.size() == 24);
  BehavioralOracle o(locked, legal, ob.activation_package, 1);
  CHECK(o.representative() != ob.activation_package);
  const auto bf = brute_force_attack(locked, o);
  CHECK(std::set<BitString>(bf.consistent_keys.begin(), bf.consistent_keys.end()) ==
        std::set<BitString>(legal.begin(), legal.end()));

  auto r = sat_attack(locked, o);
  evaluate(r, locked, obnocs_ground_truth(ob.design, ob.activation_package));
  CHECK(r.verdict == Verdict::LegalAlternate);
}

TEST_CASE("verdict taxonomy") {
  const auto ob = fixtures::star4();
  const auto locked = elaborate(ob.design);
  const auto gt = obnocs_ground_truth(ob.design, ob.activation_package);
  CHECK(verdict(ob.activation_package, locked, gt) == Verdict::FunctionalEquivalent);
  std::size_t alt = 0, failed = 0;
  for (std::uint64_t k = 0; k < 256; ++k) {
    const auto key = BitString::from_uint(k, 8);
    const auto v = verdict(key, locked, gt);
    alt += v == Verdict::LegalAlternate ? 1 : 0;
    failed += v == Verdict::Failed ? 1 : 0;
  }
  CHECK(alt == 23);
  CHECK(failed == 256 - 24);
}

TEST_CASE("collapsed fixture: the surviving lane is recovered") {
  const auto c = fixtures::collapse();
  ExactOracle o(c.post, c.ob.activation_package);
  auto r = sat_attack(c.post, o);
  evaluate(r, c.post, obnocs_ground_truth(c.ob.design, c.ob.activation_package));
  CHECK(r.verdict == Verdict::FunctionalEquivalent);
  CHECK(r.dip_count <= 4);
  // The IP6 lane's two select bits match the package.
  const auto want = lane_codes(c.ob.design, c.ob.activation_package);
  const auto got = lane_codes(c.ob.design, r.recovered_key);
  std::size_t i = 0;
  for (const auto& g : c.ob.design.groups) {
    for (const auto& lane : g.lanes) {
      if (lane.target.node == "IP6") CHECK(got[i] == want[i]);
      ++i;
    }
  }
}

TEST_CASE("potent: ground truth and verdicts") {
  RandomNetlistOptions no;
  no.inputs = 3;
  no.outputs = 3;
  no.gates = 20;
  const auto n = random_netlist(5, no);
  const auto m = extract_connectivity(n, grouping_from_ports(n, "R"));
  const auto it = integrate(n, generate_switch(m), 4, m);
  const auto sys = make_system({{"R", it.sw}});
  const auto gt = potent_ground_truth(sys);
  CHECK(gt.correct_key.to_uint() == 4);
  ExactOracle o(it.netlist, gt.correct_key);
  auto r = sat_attack(it.netlist, o);
  evaluate(r, it.netlist, gt);
  CHECK(r.verdict == Verdict::FunctionalEquivalent);
}

TEST_CASE("report json excludes wall time") {
  const auto lock = fixtures::one_bit_lock();
  ExactOracle o(lock, BitString::from_uint(1, 1));
  auto r = sat_attack(lock, o);
  GroundTruth gt{BitString::from_uint(1, 1), [](const BitString& k) {
                   return k.to_uint() == 1 ? TopologyClass::Intended : TopologyClass::NonFunctional;
                 },
                 [](const BitString& k) { return k.to_uint(); }};
  evaluate(r, lock, gt);
  const auto j = report_json(r);
  for (const char* field : {"recovered_key_hex", "dip_count", "verdict", "phi_digest", "seed"}) {
    CHECK(j.find(field) != std::string::npos);
  }
  CHECK(j.find("wall") == std::string::npos);
}
