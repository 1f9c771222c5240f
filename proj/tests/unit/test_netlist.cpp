#include <doctest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "topoveil/elaborate.hpp"
#include "topoveil/error.hpp"
#include "topoveil/generators.hpp"
#include "topoveil/netlist.hpp"
#include "topoveil/simulate.hpp"

using namespace topoveil;

namespace {

Netlist single_buf() {
  NetlistBuilder b("wire");
  const auto a = b.add_input("a");
  const auto y = b.add_output("y");
  b.buf(a[0], y[0]);
  return std::move(b).build();
}

BitString frame_key_last(const Netlist& n, const BitString& data, const BitString& key) {
  // Assemble a full input vector with the key port wherever it sits.
  BitString in;
  std::size_t d = 0;
  for (const auto& p : n.inputs) {
    if (p.name == kKeyPort) {
      in.append(key);
    } else {
      for (int i = 0; i < p.width; ++i) in.push_back(data.at(d++));
    }
  }
  return in;
}

}  // namespace

TEST_CASE("single BUF round-trips byte-identically") {
  const auto n = single_buf();
  const auto text = serialize(n);
  CHECK(serialize(parse_netlist(text)) == text);
  CHECK(parse_netlist(text) == n);
}

TEST_CASE("schema errors") {
  CHECK_THROWS_AS(parse_netlist("{}"), Error);
  const std::string two_drivers = R"({"name":"x","inputs":[{"name":"a","width":1}],
    "outputs":[{"name":"y","width":1}],"nets":["a","y"],
    "cells":[{"id":"c0","kind":"BUF","pins":{"a":"a","y":"y"}},
             {"id":"c1","kind":"NOT","pins":{"a":"a","y":"y"}}]})";
  try {
    parse_netlist(two_drivers);
    FAIL("expected MultiDriverError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MultiDriverError);
  }
  const std::string loop = R"({"name":"x","inputs":[],
    "outputs":[{"name":"y","width":1}],"nets":["y","z"],
    "cells":[{"id":"c0","kind":"NOT","pins":{"a":"z","y":"y"}},
             {"id":"c1","kind":"NOT","pins":{"a":"y","y":"z"}}]})";
  try {
    parse_netlist(loop);
    FAIL("expected CombLoopError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CombLoopError);
  }
  const std::string bad_kind = R"({"name":"x","inputs":[],"outputs":[],"nets":[],
    "cells":[{"id":"c0","kind":"NAND","pins":{}}]})";
  CHECK_THROWS_AS(parse_netlist(bad_kind), Error);
}

TEST_CASE("a loop through a DFF is legal") {
  NetlistBuilder b("toggle");
  const auto clk = b.add_input("clk");
  const auto y = b.add_output("y");
  const auto q = b.fresh_net("q");
  const auto d = b.not_(q);
  b.dff(d, clk[0], q);
  b.buf(q, y[0]);
  const auto n = std::move(b).build();
  CHECK(has_dff(n));
  const auto f = combinational_frame(n);
  CHECK_FALSE(has_dff(f));
  CHECK(f.inputs.size() == 2);
  CHECK(f.outputs.size() == 2);
}

TEST_CASE("simulator agrees with the reference evaluator") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto n = random_netlist(seed);
    const Simulator sim(n);
    SplitMix64 rng(seed);
    for (int i = 0; i < 64; ++i) {
      const auto in = oracle::random_bits(rng, sim.input_count());
      CHECK(sim.eval(in) == oracle::eval(n, in));
    }
  }
}

TEST_CASE("random netlists round-trip") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto n = random_netlist(seed);
    CHECK(parse_netlist(serialize(n)) == n);
  }
}

TEST_CASE("equivalence checker finds a counterexample") {
  const auto a = random_netlist(1);
  auto b = a;
  for (auto& c : b.cells) {
    if (c.kind == CellKind::And) {
      c.kind = CellKind::Or;
      break;
    }
  }
  CHECK(check_equivalence(a, a).equivalent);
  const auto r = check_equivalence(a, b);
  if (!r.equivalent) {
    REQUIRE(r.counterexample.has_value());
    CHECK(oracle::eval(a, *r.counterexample) != oracle::eval(b, *r.counterexample));
  }
}

TEST_CASE("bind_key fixes the key") {
  const auto lock = fixtures::one_bit_lock();
  CHECK(key_width(lock) == 1);
  const auto bound = bind_key(lock, BitString::from_uint(1, 1));
  CHECK(key_width(bound) == 0);
  const Simulator sim(bound);
  CHECK(sim.eval(BitString::from_uint(0, 1)).to_uint() == 1);
  CHECK(sim.eval(BitString::from_uint(1, 1)).to_uint() == 0);
}

TEST_CASE("drop_outputs demotes ports") {
  const auto n = random_netlist(3);
  const auto d = drop_outputs(n, {"o0", "o2"});
  CHECK(d.outputs.size() == n.outputs.size() - 2);
  CHECK(find_output(d, "o1") != nullptr);
  CHECK(find_output(d, "o0") == nullptr);
}

TEST_CASE("elaborate: one 4:1 lane is a 3-cell tree with 2 key inputs") {
  CHECK(mux_tree_cells(4) == 3);
  CHECK(mux_tree_cells(2) == 1);
  const auto ob = fixtures::star4();
  const auto n = elaborate(ob.design);
  CHECK(key_width(n) == 8);
  std::size_t muxes = 0;
  for (const auto& c : n.cells) muxes += c.kind == CellKind::Mux2 ? 1 : 0;
  CHECK(muxes == 4 * 3);

  const auto wide = elaborate(ob.design, 11);
  muxes = 0;
  for (const auto& c : wide.cells) muxes += c.kind == CellKind::Mux2 ? 1 : 0;
  CHECK(muxes == 4 * 3 * 11);
  CHECK_THROWS_AS(elaborate(ob.design, 0), Error);
}

TEST_CASE("elaborate: full tree redaction has 32 key inputs and round-trips") {
  const auto n = elaborate(fixtures::tree_full().design);
  CHECK(key_width(n) == 32);
  CHECK(parse_netlist(serialize(n)) == n);
}

TEST_CASE("elaborated function follows the induced topology") {
  const auto ob = fixtures::star4();
  const auto n = elaborate(ob.design);
  // Data inputs are the candidate out-ports; drive each with a one-hot vector
  // and check which target port lights up.
  std::vector<std::string> data;
  for (const auto& p : n.inputs) {
    if (p.name != kKeyPort) data.push_back(p.name);
  }
  const Simulator sim(n);
  SplitMix64 rng(6);
  for (int trial = 0; trial < 64; ++trial) {
    const auto key = oracle::random_bits(rng, ob.design.key_length);
    const auto links = oracle::induced_links(ob.design, key);
    for (std::size_t hot = 0; hot < data.size(); ++hot) {
      BitString d(data.size());
      d.set(hot, true);
      const auto out = sim.eval(frame_key_last(n, d, key));
      for (std::size_t o = 0; o < n.outputs.size(); ++o) {
        bool expect = false;
        for (const auto& l : links) {
          if (out_port_name(l.src) == data[hot] && in_port_name(l.dst) == n.outputs[o].name) expect = true;
        }
        CHECK(out[o] == expect);
      }
    }
  }
}
