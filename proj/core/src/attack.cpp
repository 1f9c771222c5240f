#include "topoveil/attack.hpp"

#include <algorithm>
#include <cstdio>

#include "json_io.hpp"
#include "topoveil/cnf.hpp"
#include "topoveil/error.hpp"
#include "topoveil/prng.hpp"

namespace topoveil {

std::string_view to_string(OracleKind k) { return k == OracleKind::Exact ? "exact" : "behavioral"; }

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::FunctionalEquivalent: return "functional-equivalent";
    case Verdict::LegalAlternate: return "legal-alternate";
    case Verdict::Failed: return "failed";
  }
  return "?";
}

BitString Oracle::query(const BitString& inputs) {
  ++queries_;
  return answer(inputs);
}

namespace {

Netlist unlocked_frame(const Netlist& locked, const BitString& key) {
  return bind_key(combinational_frame(locked), key);
}

}  // namespace

ExactOracle::ExactOracle(const Netlist& locked, const BitString& key) : sim_(unlocked_frame(locked, key)) {}

BitString ExactOracle::answer(const BitString& inputs) { return sim_.eval(inputs); }

bool ExactOracle::accepts(const std::vector<BitString>& inputs, const std::vector<BitString>& outputs) {
  if (inputs.size() != outputs.size()) return false;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (sim_.eval(inputs[i]) != outputs[i]) return false;
  }
  return true;
}

BehavioralOracle::BehavioralOracle(const Netlist& locked, std::vector<BitString> legal_keys,
                                   const BitString& intended, std::uint64_t seed) {
  if (legal_keys.empty()) throw Error(ErrorCode::OracleMismatch, "behavioral oracle needs legal keys");
  std::sort(legal_keys.begin(), legal_keys.end());
  legal_keys.erase(std::unique(legal_keys.begin(), legal_keys.end()), legal_keys.end());
  const Netlist frame = combinational_frame(locked);
  for (const auto& k : legal_keys) legal_.emplace_back(bind_key(frame, k));

  std::vector<std::size_t> others;
  for (std::size_t i = 0; i < legal_keys.size(); ++i) {
    if (legal_keys[i] != intended) others.push_back(i);
  }
  SplitMix64 rng(seed);
  if (others.empty()) {
    rep_index_ = static_cast<std::size_t>(rng.below(legal_keys.size()));
  } else {
    rep_index_ = others[rng.below(others.size())];
  }
  representative_ = legal_keys[rep_index_];
}

BitString BehavioralOracle::answer(const BitString& inputs) { return legal_[rep_index_].eval(inputs); }

bool BehavioralOracle::accepts(const std::vector<BitString>& inputs, const std::vector<BitString>& outputs) {
  if (inputs.size() != outputs.size()) return false;
  std::vector<char> alive(legal_.size(), 1);
  std::lock_guard lock(mu_);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    auto it = cache_.find(inputs[i]);
    if (it == cache_.end()) {
      std::vector<BitString> outs;
      for (const auto& s : legal_) outs.push_back(s.eval(inputs[i]));
      it = cache_.emplace(inputs[i], std::move(outs)).first;
    }
    bool any = false;
    for (std::size_t k = 0; k < legal_.size(); ++k) {
      alive[k] = alive[k] && it->second[k] == outputs[i];
      any = any || alive[k];
    }
    if (!any) return false;
  }
  return true;
}

GroundTruth obnocs_ground_truth(const ObfuscatedDesign& d, const BitString& activation_package) {
  auto intended = std::make_shared<Topology>(induce_topology(d, activation_package));
  auto design = std::make_shared<ObfuscatedDesign>(d);
  GroundTruth gt;
  gt.correct_key = activation_package;
  gt.classify = [design, intended](const BitString& k) {
    return classify(induce_topology(*design, k), *intended);
  };
  gt.phi_digest = [design](const BitString& k) { return topology_digest(induce_topology(*design, k)); };
  return gt;
}

GroundTruth potent_ground_truth(const KeyedSystem& sys) {
  auto s = std::make_shared<KeyedSystem>(sys);
  GroundTruth gt;
  gt.correct_key = sys.correct_key();
  gt.classify = [s](const BitString& k) {
    bool identity = true;
    for (const auto& m : s->apply(k)) {
      if (!m) return TopologyClass::NonFunctional;
      for (std::size_t i = 0; i < m->size(); ++i) identity = identity && (*m)[i] == static_cast<int>(i);
    }
    return identity ? TopologyClass::Intended : TopologyClass::LegalAlternate;
  };
  gt.phi_digest = [s](const BitString& k) {
    std::string text;
    const auto maps = s->apply(k);
    for (std::size_t r = 0; r < maps.size(); ++r) {
      text += s->routers[r].router + ":";
      if (!maps[r]) {
        text += "ZERO";
      } else {
        for (int x : *maps[r]) text += std::to_string(x) + ",";
      }
      text += ";";
    }
    return fnv1a64(text);
  };
  return gt;
}

Verdict verdict(const BitString& key, const Netlist& locked, const GroundTruth& gt, const EquivalenceOptions& eq) {
  const TopologyClass cls = gt.classify(key);
  if (cls == TopologyClass::Intended) return Verdict::FunctionalEquivalent;
  if (check_equivalence(unlocked_frame(locked, key), unlocked_frame(locked, gt.correct_key), eq).equivalent) {
    return Verdict::FunctionalEquivalent;
  }
  return cls == TopologyClass::LegalAlternate ? Verdict::LegalAlternate : Verdict::Failed;
}

void evaluate(AttackResult& r, const Netlist& locked, const GroundTruth& gt) {
  r.verdict = verdict(r.recovered_key, locked, gt);
  r.phi_digest = gt.phi_digest(r.recovered_key);
}

namespace {

struct FrameIo {
  Netlist frame;
  std::vector<std::string> inputs;  // non-key input nets
  std::vector<std::string> keys;
  std::vector<std::string> outputs;
};

FrameIo split_frame(const Netlist& locked) {
  FrameIo io{combinational_frame(locked), {}, {}, {}};
  const Port* key = find_input(io.frame, kKeyPort);
  if (key == nullptr) throw Error(ErrorCode::SchemaError, locked.name + " has no key port");
  for (const auto& p : io.frame.inputs) {
    auto nets = port_nets(p);
    auto& dst = p.name == kKeyPort ? io.keys : io.inputs;
    dst.insert(dst.end(), nets.begin(), nets.end());
  }
  io.outputs = output_bit_nets(io.frame);
  return io;
}

}  // namespace

AttackResult sat_attack(const Netlist& locked, Oracle& oracle, const AttackOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  const FrameIo io = split_frame(locked);
  auto engine = make_engine(opts.engine);
  const ClauseSink sink = sink_for(*engine);

  const int truth = sink.new_var();
  {
    const Lit unit[] = {truth};
    sink.add(unit);
  }
  std::map<std::string, int> shared, key_a, key_b;
  for (const auto& net : io.inputs) shared[net] = sink.new_var();
  for (const auto& net : io.keys) {
    key_a[net] = sink.new_var();
    key_b[net] = sink.new_var();
  }
  auto with = [](std::map<std::string, int> a, const std::map<std::string, int>& b) {
    a.insert(b.begin(), b.end());
    return a;
  };
  const auto va = encode_netlist(io.frame, sink, with(shared, key_a));
  const auto vb = encode_netlist(io.frame, sink, with(shared, key_b));

  // act -> some output differs
  const int act = sink.new_var();
  std::vector<Lit> miter{-act};
  for (const auto& o : io.outputs) {
    const int a = va.at(o), b = vb.at(o), d = sink.new_var();
    const Lit c1[] = {-d, a, b}, c2[] = {-d, -a, -b};
    sink.add(c1);
    sink.add(c2);
    miter.push_back(d);
  }
  sink.add(miter);

  AttackResult r;
  r.seed = opts.seed;
  const Lit assume[] = {act};
  for (;;) {
    const SatResult s = engine->solve(assume);
    if (s == SatResult::Unknown) throw Error(ErrorCode::BudgetExhausted, "engine gave up");
    if (s == SatResult::Unsat) break;
    if (r.dip_count >= opts.budget) {
      throw Error(ErrorCode::BudgetExhausted, "no convergence within " + std::to_string(opts.budget) + " DIPs");
    }
    BitString dip;
    for (const auto& net : io.inputs) dip.push_back(engine->value(shared.at(net)));
    const BitString y = oracle.query(dip);
    if (y.size() != io.outputs.size()) throw Error(ErrorCode::OracleMismatch, "oracle output width");
    std::map<std::string, int> fixed;
    for (std::size_t i = 0; i < io.inputs.size(); ++i) fixed[io.inputs[i]] = dip[i] ? truth : -truth;
    for (const auto* key : {&key_a, &key_b}) {
      const auto v = encode_netlist(io.frame, sink, with(fixed, *key));
      for (std::size_t i = 0; i < io.outputs.size(); ++i) {
        const Lit unit[] = {y[i] ? v.at(io.outputs[i]) : -v.at(io.outputs[i])};
        sink.add(unit);
      }
    }
    r.dips.push_back(std::move(dip));
    ++r.dip_count;
  }
  if (engine->solve() != SatResult::Sat) {
    throw Error(ErrorCode::UnsatFromStart, "no key is consistent with the oracle after " +
                                               std::to_string(r.dip_count) + " DIPs");
  }
  for (const auto& net : io.keys) r.recovered_key.push_back(engine->value(key_a.at(net)));
  r.oracle_queries = r.dip_count;
  r.wall_time = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - start);
  return r;
}

AttackResult brute_force_attack(const Netlist& locked, Oracle& oracle, const BruteForceOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  const FrameIo io = split_frame(locked);
  const std::size_t w = io.keys.size();
  if (w > opts.max_key_bits) {
    throw Error(ErrorCode::KeyspaceTooLarge, std::to_string(w) + "-bit key exceeds brute-force limit");
  }
  const Simulator sim(io.frame);
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < sim.input_nets().size(); ++i) pos[sim.input_nets()[i]] = i;

  std::vector<BitString> vectors;
  const std::size_t m = io.inputs.size();
  if (m <= opts.exhaustive_inputs) {
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << m); ++x) vectors.push_back(BitString::from_uint(x, m));
  } else {
    SplitMix64 rng(opts.seed);
    for (std::size_t s = 0; s < opts.samples; ++s) {
      BitString v(m);
      for (std::size_t i = 0; i < m; ++i) v.set(i, rng.next() & 1);
      vectors.push_back(std::move(v));
    }
  }
  std::vector<BitString> expected;
  if (oracle.kind() == OracleKind::Exact) {
    for (const auto& v : vectors) expected.push_back(oracle.query(v));
  }

  AttackResult r;
  r.seed = opts.seed;
  const std::uint64_t total = std::uint64_t{1} << w;
  std::vector<std::uint64_t> in(sim.input_count()), out(sim.output_count());
  for (std::uint64_t base = 0; base < total; base += 64) {
    const std::size_t lanes = static_cast<std::size_t>(std::min<std::uint64_t>(64, total - base));
    for (std::size_t j = 0; j < w; ++j) {
      std::uint64_t word = 0;
      for (std::size_t p = 0; p < lanes; ++p) word |= (((base + p) >> (w - 1 - j)) & 1) << p;
      in[pos.at(io.keys[j])] = word;
    }
    // traces[p][v] = outputs of key base+p on vector v
    std::vector<std::vector<BitString>> traces(lanes, std::vector<BitString>(vectors.size()));
    for (std::size_t v = 0; v < vectors.size(); ++v) {
      for (std::size_t i = 0; i < m; ++i) in[pos.at(io.inputs[i])] = vectors[v][i] ? ~std::uint64_t{0} : 0;
      sim.eval(in, out);
      for (std::size_t p = 0; p < lanes; ++p) {
        BitString y(io.outputs.size());
        for (std::size_t o = 0; o < io.outputs.size(); ++o) y.set(o, (out[o] >> p) & 1);
        traces[p][v] = std::move(y);
      }
    }
    for (std::size_t p = 0; p < lanes; ++p) {
      const bool ok = oracle.kind() == OracleKind::Exact ? traces[p] == expected
                                                         : oracle.accepts(vectors, traces[p]);
      if (ok) r.consistent_keys.push_back(BitString::from_uint(base + p, w));
    }
  }
  if (r.consistent_keys.empty()) throw Error(ErrorCode::UnsatFromStart, "no key is consistent with the oracle");
  r.recovered_key = r.consistent_keys.front();
  r.oracle_queries = oracle.queries();
  r.wall_time = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - start);
  return r;
}

std::string report_json(const AttackResult& r) {
  char digest[19];
  std::snprintf(digest, sizeof digest, "%016llx", static_cast<unsigned long long>(r.phi_digest));
  detail::json j = {{"recovered_key_hex", r.recovered_key.to_hex()},
                    {"key_bits", r.recovered_key.size()},
                    {"dip_count", r.dip_count},
                    {"oracle_queries", r.oracle_queries},
                    {"verdict", r.verdict ? detail::json(std::string(to_string(*r.verdict))) : detail::json()},
                    {"phi_digest", std::string(digest)},
                    {"seed", r.seed}};
  if (!r.consistent_keys.empty()) {
    detail::json keys = detail::json::array();
    for (const auto& k : r.consistent_keys) keys.push_back(k.to_hex());
    j["consistent_keys_hex"] = keys;
  }
  return detail::dump(j);
}

}  // namespace topoveil
