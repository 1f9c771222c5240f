#include <doctest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "topoveil/elaborate.hpp"
#include "topoveil/generators.hpp"
#include "topoveil/optimize.hpp"
#include "topoveil/simulate.hpp"

using namespace topoveil;

namespace {

std::size_t count(const Netlist& n, CellKind k) {
  std::size_t c = 0;
  for (const auto& cell : n.cells) c += cell.kind == k ? 1 : 0;
  return c;
}

}  // namespace

TEST_CASE("mux with sel tied high becomes a wire from b") {
  NetlistBuilder b("m");
  const auto a = b.add_input("a");
  const auto bb = b.add_input("b");
  const auto y = b.add_output("y");
  b.mux(a[0], bb[0], b.const1(), y[0]);
  const auto n = synthesize_lite(std::move(b).build());
  CHECK(count(n, CellKind::Mux2) == 0);
  REQUIRE(n.cells.size() == 1);
  CHECK(n.cells[0].kind == CellKind::Buf);
  CHECK(n.cells[0].pin("a") == "b");
}

TEST_CASE("AND with CONST0 folds to CONST0") {
  NetlistBuilder b("z");
  const auto a = b.add_input("a");
  const auto y = b.add_output("y");
  b.and_(a[0], b.const0(), y[0]);
  const auto n = synthesize_lite(std::move(b).build());
  REQUIRE(n.cells.size() == 1);
  CHECK(n.cells[0].kind == CellKind::Const0);
  CHECK(n.cells[0].output() == "y");
}

TEST_CASE("double negation and duplicates collapse") {
  NetlistBuilder b("d");
  const auto a = b.add_input("a");
  const auto c = b.add_input("c");
  const auto y = b.add_output("y");
  const auto z = b.add_output("z");
  b.buf(b.not_(b.not_(a[0])), y[0]);
  b.xor_(b.and_(a[0], c[0]), b.and_(c[0], a[0]), z[0]);
  const auto n = synthesize_lite(std::move(b).build());
  CHECK(count(n, CellKind::Not) == 0);
  CHECK(count(n, CellKind::And) == 0);  // x ^ x with x shared -> const
  CHECK(check_equivalence(n, synthesize_lite(n)).equivalent);
}

TEST_CASE("unobserved switch trees disappear") {
  const auto ob = fixtures::star4();
  const auto n = elaborate(ob.design);
  std::set<std::string> all;
  for (const auto& p : n.outputs) all.insert(p.name);
  const auto gone = synthesize_lite(drop_outputs(n, all));
  CHECK(gone.cells.empty());
}

TEST_CASE("function preserved and idempotent on random netlists") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    RandomNetlistOptions o;
    o.inputs = 3 + static_cast<int>(seed % 10);
    o.gates = 20 + static_cast<int>(seed % 50);
    o.mux_percent = 30;
    const auto n = random_netlist(seed, o);
    const auto once = synthesize_lite(n);
    const auto r = check_equivalence(n, once);
    CHECK(r.equivalent);
    CHECK(r.exhaustive);
    CHECK(synthesize_lite(once) == once);
  }
}

TEST_CASE("sequential netlists keep their registers") {
  RandomNetlistOptions o;
  o.dffs = 4;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto n = random_netlist(seed, o);
    const auto s = synthesize_lite(n);
    CHECK(check_equivalence(combinational_frame(n), combinational_frame(s)).equivalent);
    CHECK(synthesize_lite(s) == s);
  }
}

TEST_CASE("dead logic removed only when unobservable") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto n = random_netlist(seed);
    const auto kept = drop_outputs(n, {"o0"});
    const auto s = synthesize_lite(kept);
    // Every surviving input is still read, and each read input reaches some output.
    for (const auto& p : s.inputs) {
      bool read = false;
      for (const auto& c : s.cells) {
        for (const auto& [pin, net] : c.pins) read = read || (pin != output_pin(c.kind) && net == p.name);
      }
      if (!read) continue;
      bool reaches = false;
      for (const auto& o : s.outputs) reaches = reaches || oracle::reaches(s, p.name, o.name);
      CHECK(reaches);
    }
  }
}

TEST_CASE("collapse fixture keeps only the IP6 lane") {
  const auto c = fixtures::collapse();
  CHECK(c.dropped.size() == 3);
  CHECK(count(c.pre, CellKind::Mux2) == 12);
  CHECK(count(c.post, CellKind::Mux2) == 3);
  CHECK(c.post.outputs.size() == 1);
  CHECK(c.post.outputs[0].name == "IP6_in0");
}
