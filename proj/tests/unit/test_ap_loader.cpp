#include <doctest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "topoveil/ap_loader.hpp"
#include "topoveil/elaborate.hpp"
#include "topoveil/error.hpp"
#include "topoveil/simulate.hpp"

using namespace topoveil;

TEST_CASE("reset and width errors") {
  CHECK_THROWS_AS(SipoRegister::reset(0), Error);
  const auto r = SipoRegister::reset(4);
  CHECK(r.state() == BitString(4));
  CHECK_THROWS_AS(load_package(r, BitString(5)), Error);
}

TEST_CASE("shift direction: first serial bit ends at index 0") {
  auto r = SipoRegister::reset(4);
  r = r.clock(true, true);
  CHECK(r.state().to_binary() == "0001");
  r = r.clock(false, true);
  CHECK(r.state().to_binary() == "0010");
  r = r.clock(false, true);
  r = r.clock(false, true);
  CHECK(r.state().to_binary() == "1000");
}

TEST_CASE("gated cycles hold state") {
  SplitMix64 rng(1);
  auto r = SipoRegister::reset(16);
  for (int i = 0; i < 16; ++i) r = r.clock(rng.next() & 1, true);
  const auto before = r.state();
  for (int i = 0; i < 40; ++i) {
    r = r.clock(rng.next() & 1, false);
    CHECK(r.state() == before);
    CHECK_FALSE(r.load_enabled());
  }
}

TEST_CASE("load reproduces random packages") {
  SplitMix64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t w = 8 + rng.below(57);
    const auto ap = oracle::random_bits(rng, w);
    const auto [reg, trace] = load_package(SipoRegister::reset(w), ap);
    CHECK(reg.state() == ap);
    CHECK(trace.size() == w + 1);
    CHECK_FALSE(trace.back().load_en);
    CHECK(trace.back().state == ap);
  }
}

TEST_CASE("trace csv") {
  const auto ap = BitString::from_uint(0x3c, 8);
  const auto [reg, trace] = load_package(SipoRegister::reset(8), ap);
  const auto csv = trace_to_csv(trace);
  CHECK(csv.rfind("cycle,ap_in,load_en,state_hex\n0,0,1,00\n", 0) == 0);
  CHECK(csv.find("8,0,0,3c\n") != std::string::npos);
}

TEST_CASE("loaded key drives induce exactly like the package") {
  const auto ob = fixtures::tree_full();
  const auto [reg, trace] = load_package(SipoRegister::reset(ob.design.key_length), ob.activation_package);
  CHECK(topology_equal(induce_topology(ob.design, reg.state()),
                       induce_topology(ob.design, ob.activation_package)));
}

TEST_CASE("gate-level SIPO matches the behavioral register") {
  const std::size_t w = 6;
  const auto n = elaborate_sipo(w);
  const Simulator sim(n);
  // Frame inputs: ap_in, load_en, clk, then the DFF outputs in cell order.
  REQUIRE(sim.input_count() == 3 + w);
  REQUIRE(sim.output_count() == w + w);

  // DFF slots follow cell-id order; map each slot back to its key bit.
  std::vector<std::size_t> bit(w);
  for (std::size_t j = 0; j < w; ++j) {
    const auto& name = sim.input_nets()[3 + j];
    bit[j] = std::stoul(name.substr(name.find('[') + 1));
  }

  SplitMix64 rng(8);
  auto reg = SipoRegister::reset(w);
  BitString q(w);
  for (int cycle = 0; cycle < 60; ++cycle) {
    const bool in = rng.next() & 1, en = rng.below(4) != 0;
    BitString frame;
    frame.push_back(in);
    frame.push_back(en);
    frame.push_back(false);
    for (std::size_t j = 0; j < w; ++j) frame.push_back(q[bit[j]]);
    const auto out = sim.eval(frame);
    // The key output shows the current (pre-edge) state.
    CHECK(out.slice(0, w) == q);
    for (std::size_t j = 0; j < w; ++j) q.set(bit[j], out[w + j]);
    reg = reg.clock(in, en);
    CHECK(q == reg.state());
  }
}
