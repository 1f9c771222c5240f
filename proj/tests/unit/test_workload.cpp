#include <doctest.h>

#include "fixtures.hpp"
#include "topoveil/error.hpp"
#include "topoveil/generators.hpp"
#include "topoveil/workload.hpp"

using namespace topoveil;

TEST_CASE("alu wraps at 32 bits") {
  CHECK(alu(AluOp::Add, 20, 22) == 42);
  CHECK(alu(AluOp::Add, 0x7fffffff, 1) == std::int32_t(0x80000000u));
  CHECK(alu(AluOp::Sub, 0, 1) == -1);
  CHECK(alu(AluOp::And, 0xff, 0x3c) == 0x3c);
  CHECK(alu(AluOp::Or, 3, 12) == 15);
  CHECK(alu(AluOp::Xor, 0x5a, 0x0f) == 0x55);
}

TEST_CASE("workload json") {
  const auto w = fixtures::tree_workload();
  CHECK(workload_from_json(to_json(w)) == w);
  CHECK_THROWS_AS(workload_from_json(R"([{"src":"A","dst":"B","op":"MUL","a":1,"b":2}])"), Error);
  CHECK_THROWS_AS(workload_from_json(R"({"src":"A"})"), Error);
}

TEST_CASE("routes on the tree SoC") {
  const auto t = example_tree_soc();
  const auto rt = build_routes(t);
  // R1 reaches IP6 directly on the port of its R1->IP6 link.
  int port = -1;
  for (const auto& l : t.out_links("R1")) {
    if (l.dst.node == "IP6") port = l.src.port;
  }
  CHECK(rt.lookup("R1", "IP6") == port);
  CHECK(rt.lookup("R2", "IP1").has_value());
  CHECK_FALSE(rt.lookup("IP1", "IP2").has_value());
  auto broken = t;
  broken.remove_link(t.out_links("R1").front());
  CHECK_THROWS_AS(build_routes(broken), Error);
}

TEST_CASE("golden run delivers everything") {
  const auto ob = fixtures::tree_r1();
  const auto bench = make_bench(ob.design, ob.activation_package, "IP6");
  const auto w = fixtures::tree_workload();
  const auto run = run_dut(bench, ob.activation_package, w);
  CHECK(run.cls == TopologyClass::Intended);
  for (std::size_t i = 0; i < w.size(); ++i) {
    CHECK(run.delivered[i].status == DeliveryStatus::Delivered);
    CHECK(run.delivered[i].final_node == w[i].dst);
    CHECK(run.delivered[i].path.front() == w[i].src);
  }
  REQUIRE(run.alu_results.size() == 2);
  CHECK(run.alu_results[0].value == 42);
  CHECK(run.alu_results[1].value == 0x3c);
}

TEST_CASE("coverage") {
  const auto ob = fixtures::tree_r1();
  const auto bench = make_bench(ob.design, ob.activation_package, "IP6");
  const auto c = check_coverage(bench, fixtures::tree_workload());
  CHECK(c.redacted.size() == 4);
  CHECK(c.complete());
  // With only R3 redacted, IP4 -> IP5 stays on R2 -> R1 -> R4.
  const auto r3 = insert_switches(example_tree_soc(), {"R3"});
  const auto b3 = make_bench(r3.design, r3.activation_package, "IP6");
  try {
    check_coverage(b3, {{"IP4", "IP5", AluOp::Add, 0, 0}});
    FAIL("expected WorkloadCoverage");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::WorkloadCoverage);
  }
  CHECK_THROWS_AS(make_bench(ob.design, ob.activation_package, "R1"), Error);
}

TEST_CASE("every legal alternate diverges, non-functional keys are silent") {
  const auto ob = fixtures::tree_r1();
  const auto bench = make_bench(ob.design, ob.activation_package, "IP6");
  const auto w = fixtures::tree_workload();
  const auto golden = run_dut(bench, ob.activation_package, w);
  std::vector<BitString> keys;
  for (const auto& r : enumerate_keys(ob.design, &bench.intended)) keys.push_back(r.key);
  const auto runs = run_duts(bench, keys, w);
  const auto rep = compare_runs(golden, runs);
  CHECK(rep.match == 1);
  CHECK(rep.functional_mismatch == 23);
  CHECK(rep.silent == 256 - 24);
  for (const auto& row : rep.rows) {
    if (row.cls == TopologyClass::Intended) CHECK(row.outcome == DutOutcome::Match);
    if (row.cls == TopologyClass::LegalAlternate) CHECK(row.outcome == DutOutcome::FunctionalMismatch);
    if (row.cls == TopologyClass::NonFunctional) CHECK(row.outcome == DutOutcome::Silent);
  }
  const auto text = to_json(rep);
  CHECK(text.find("\"tally\"") != std::string::npos);
}

TEST_CASE("parallel and sequential runs agree") {
  const auto ob = fixtures::tree_r1();
  const auto bench = make_bench(ob.design, ob.activation_package, "IP6");
  const auto w = fixtures::tree_workload();
  std::vector<BitString> keys;
  for (std::uint64_t k = 0; k < 40; ++k) keys.push_back(BitString::from_uint(k * 5, 8));
  const auto par = run_duts(bench, keys, w);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const auto seq = run_dut(bench, keys[i], w);
    CHECK(par[i].delivered == seq.delivered);
    CHECK(par[i].alu_results == seq.alu_results);
  }
}

TEST_CASE("mismatched workloads are rejected") {
  const auto ob = fixtures::tree_r1();
  const auto bench = make_bench(ob.design, ob.activation_package, "IP6");
  auto w = fixtures::tree_workload();
  const auto golden = run_dut(bench, ob.activation_package, w);
  w.pop_back();
  const auto other = run_dut(bench, ob.activation_package, w);
  CHECK_THROWS_AS(compare_runs(golden, {other}), Error);
  CHECK_THROWS_AS(run_dut(bench, ob.activation_package, {{"IP1", "IP77", AluOp::Add, 0, 0}}), Error);
}
