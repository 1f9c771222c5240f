#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <fstream>
#include <sstream>

#include "topoveil/ap_loader.hpp"
#include "topoveil/attack.hpp"
#include "topoveil/cnf.hpp"
#include "topoveil/connectivity.hpp"
#include "topoveil/elaborate.hpp"
#include "topoveil/error.hpp"
#include "topoveil/generators.hpp"
#include "topoveil/obnocs.hpp"
#include "topoveil/optimize.hpp"
#include "topoveil/overhead.hpp"
#include "topoveil/potent.hpp"
#include "topoveil/prng.hpp"
#include "topoveil/sat.hpp"
#include "topoveil/workload.hpp"

namespace topoveil {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw Error(ErrorCode::Io, "cannot write " + path);
}

/// Writes to `path`, or to `out` when no path was given.
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    write_file(path, text);
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) {
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

BitString read_key(const std::string& path) { return parse_key_file(read_file(path)); }

/// One hex key per line, each `width` bits wide.
std::vector<BitString> read_key_list(const std::string& path, std::size_t width) {
  std::vector<BitString> keys;
  std::istringstream is(read_file(path));
  std::string line;
  while (std::getline(is, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    keys.push_back(BitString::from_hex(line, width));
  }
  return keys;
}

std::set<NodeId> level_routers(const Topology& t, ObfuscationLevel level, bool cap, std::uint64_t seed) {
  auto pool = redactable_routers(t);
  std::size_t k = static_cast<std::size_t>(router_count(level));
  if (k > pool.size()) {
    if (!cap) {
      throw Error(ErrorCode::LevelExceedsRouters, "level " + std::string(to_string(level)) + " needs " +
                                                      std::to_string(k) + " routers, topology has " +
                                                      std::to_string(pool.size()) + " redactable");
    }
    k = pool.size();
  }
  SplitMix64 rng(seed);
  fisher_yates(std::span<NodeId>(pool), rng);
  return {pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k)};
}

struct Args {
  std::string topology, design, ap, key, keys, netlist, post, out, ap_out, workload, router, routers, level,
      oracle = "exact", engine = "cdcl", alu = "IP6", drop, kind = "tree", switch_path, matrix_out, switch_out,
      keys_out;
  std::uint64_t seed = 0, budget = 1024, samples = 10, correct_key = 0;
  int stages = 1, bus_width = 1, key_width = 0, copies = 1, size = 4, sipo = 0;
  std::size_t enum_cap = 24;
  std::uint64_t enum_samples = 0;
  bool no_shuffle = false, cap = false, live_only = false, synthesize = false, list = false;
};

struct Ground {
  GroundTruth gt;
  std::vector<BitString> legal;  // for the behavioral oracle
};

Ground ground_truth(const Args& a) {
  Ground g;
  const bool need_legal = a.oracle == "behavioral";
  if (!a.design.empty()) {
    if (a.ap.empty()) throw Error(ErrorCode::SchemaError, "--design needs --ap for ground truth");
    const auto d = design_from_json(read_file(a.design));
    const auto ap = read_key(a.ap);
    g.gt = obnocs_ground_truth(d, ap);
    if (!need_legal) return g;
    const Topology intended = induce_topology(d, ap);
    EnumerateOptions eo;
    eo.cap_bits = a.enum_cap;
    for_each_key(d, &intended, eo, [&](const KeyRecord& r) {
      if (r.cls != TopologyClass::NonFunctional) g.legal.push_back(r.key);
    });
    return g;
  }
  if (!a.switch_path.empty()) {
    ObfuscatedRouter r{"router", switch_from_json(read_file(a.switch_path))};
    const auto sys = make_system({r});
    g.gt = potent_ground_truth(sys);
    if (!need_legal) return g;
    const std::uint64_t perms = r.sw.permutations();
    for (std::uint64_t k = 0; k < perms; ++k) g.legal.push_back(BitString::from_uint(k, r.sw.key_width));
    return g;
  }
  if (a.key.empty()) throw Error(ErrorCode::SchemaError, "ground truth needs --key, --switch or --design/--ap");
  const BitString correct = read_key(a.key);
  g.gt.correct_key = correct;
  g.gt.classify = [correct](const BitString& k) {
    return k == correct ? TopologyClass::Intended : TopologyClass::NonFunctional;
  };
  g.gt.phi_digest = [](const BitString& k) { return fnv1a64(k.to_hex()); };
  g.legal.push_back(correct);
  return g;
}

std::unique_ptr<Oracle> make_oracle(const Args& a, const Netlist& locked, const Ground& g) {
  if (a.oracle == "exact") return std::make_unique<ExactOracle>(locked, g.gt.correct_key);
  if (a.oracle == "behavioral") {
    return std::make_unique<BehavioralOracle>(locked, g.legal, g.gt.correct_key, a.seed);
  }
  throw CLI::ValidationError("--oracle", "must be exact or behavioral");
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Topology obfuscation toolkit for networks-on-chip", "topoveil"};
  app.require_subcommand(1);
  Args a;

  auto* validate_cmd = app.add_subcommand("validate", "Check a topology for structural and functional faults");
  validate_cmd->add_option("--topology", a.topology, "Topology JSON")->required();

  auto* generate = app.add_subcommand("generate", "Write a built-in or random topology, or a router netlist");
  generate->add_option("kind", a.kind, "tree | star | random | router | netlist")
      ->check(CLI::IsMember({"tree", "star", "random", "router", "netlist"}));
  generate->add_option("--size", a.size, "IP count for star, data width for router, inputs for netlist");
  generate->add_option("--seed", a.seed);
  generate->add_option("--out", a.out);

  auto* obfuscate = app.add_subcommand("obfuscate", "Insert obfuscation switches");
  obfuscate->require_subcommand(1);
  auto* obnocs = obfuscate->add_subcommand("obnocs", "Replace router links by keyed MUX-DEMUX switches");
  obnocs->add_option("--topology", a.topology)->required();
  auto* routers_opt = obnocs->add_option("--routers", a.routers, "Comma-separated router ids");
  obnocs->add_option("--level", a.level, "0 | I | II | III | IV")->excludes(routers_opt);
  obnocs->add_flag("--cap", a.cap, "Clamp the level to the available routers");
  obnocs->add_option("--stages", a.stages)->check(CLI::IsMember({1, 2}));
  obnocs->add_option("--seed", a.seed);
  obnocs->add_flag("--no-shuffle", a.no_shuffle, "Keep candidates in sorted order");
  obnocs->add_option("--out", a.out, "Design JSON");
  obnocs->add_option("--ap-out", a.ap_out, "Activation package key file");

  auto* potent = obfuscate->add_subcommand("potent", "Integrate a keyed permutation switch into a router netlist");
  potent->add_option("--netlist", a.netlist, "Router netlist JSON")->required();
  potent->add_option("--post", a.post, "Post-synthesis netlist (default: synthesize-lite of --netlist)");
  potent->add_option("--router", a.router, "Router id")->required();
  potent->add_option("--key-width", a.key_width, "Switch key bits (default ceil(log2 n!))");
  potent->add_option("--correct-key", a.correct_key);
  potent->add_option("--out", a.out, "Obfuscated router netlist");
  potent->add_option("--switch-out", a.switch_out, "Switch JSON");
  potent->add_option("--matrix-out", a.matrix_out, "Updated connectivity CSV");

  auto* induce = app.add_subcommand("induce", "Topology induced by a key");
  induce->add_option("--design", a.design)->required();
  induce->add_option("--key", a.key, "Key file")->required();
  induce->add_option("--out", a.out);

  auto* enumerate = app.add_subcommand("enumerate", "Enumerate keys and count legal topologies");
  enumerate->add_option("--design", a.design)->required();
  enumerate->add_option("--ap", a.ap, "Activation package (marks the intended key)");
  enumerate->add_option("--cap", a.enum_cap, "Largest exhaustively enumerated key length");
  enumerate->add_option("--samples", a.enum_samples, "Sample this many keys beyond the cap");
  enumerate->add_option("--seed", a.seed);
  enumerate->add_option("--out", a.out, "Per-key records as JSON");

  auto* load_ap = app.add_subcommand("load-ap", "Cycle trace of the SIPO activation-package loader");
  load_ap->add_option("--ap", a.ap)->required();
  load_ap->add_option("--out", a.out, "Trace CSV");

  auto* elaborate_cmd = app.add_subcommand("elaborate", "Lower switches (or the AP loader) to gates");
  auto* design_opt = elaborate_cmd->add_option("--design", a.design);
  elaborate_cmd->add_option("--sipo", a.sipo, "Elaborate a SIPO loader of this width")->excludes(design_opt);
  elaborate_cmd->add_option("--bus-width", a.bus_width)->check(CLI::PositiveNumber);
  elaborate_cmd->add_option("--out", a.out);

  auto* optimize = app.add_subcommand("optimize", "Synthesis-lite");
  optimize->add_option("--netlist", a.netlist)->required();
  optimize->add_option("--drop", a.drop, "Comma-separated output ports to demote first");
  optimize->add_option("--out", a.out);

  auto* connectivity = app.add_subcommand("connectivity", "Connectivity matrices (pre AND post)");
  connectivity->add_option("--netlist", a.netlist, "Pre-synthesis netlist")->required();
  auto* post_opt = connectivity->add_option("--post", a.post, "Post-synthesis netlist");
  connectivity->add_flag("--synthesize", a.synthesize, "Use synthesize-lite as the post netlist")
      ->excludes(post_opt);
  connectivity->add_option("--router", a.router)->required();
  connectivity->add_option("--out", a.out, "M_final CSV");

  auto* attack = app.add_subcommand("attack", "Key-recovery attacks");
  attack->require_subcommand(1);
  auto add_attack_opts = [&](CLI::App* c) {
    c->add_option("--locked", a.netlist, "Locked netlist")->required();
    c->add_option("--key", a.key, "Correct key file (exact oracle ground truth)");
    c->add_option("--switch", a.switch_path, "POTENT switch JSON (ground truth)");
    c->add_option("--design", a.design, "ObNoCs design (ground truth, with --ap)");
    c->add_option("--ap", a.ap);
    c->add_option("--oracle", a.oracle)->check(CLI::IsMember({"exact", "behavioral"}));
    c->add_option("--seed", a.seed);
    c->add_option("--out", a.out, "Report JSON");
  };
  auto* attack_sat = attack->add_subcommand("sat", "Oracle-guided SAT attack");
  add_attack_opts(attack_sat);
  attack_sat->add_option("--budget", a.budget, "Maximum DIPs");
  attack_sat->add_option("--engine", a.engine, "cdcl | dimacs:<command>");
  auto* attack_brute = attack->add_subcommand("brute", "Exhaustive key search");
  add_attack_opts(attack_brute);

  auto* simulate = app.add_subcommand("simulate", "Run a workload on DUTs built from several keys");
  simulate->add_option("--design", a.design)->required();
  simulate->add_option("--ap", a.ap, "Activation package of the golden DUT")->required();
  simulate->add_option("--keys", a.keys, "One hex key per line")->required();
  simulate->add_option("--workload", a.workload)->required();
  simulate->add_option("--alu", a.alu, "IP hosting the ALU");
  simulate->add_option("--out", a.out, "Divergence report JSON");

  auto* report = app.add_subcommand("report", "Reports");
  report->require_subcommand(1);
  auto* overhead = report->add_subcommand("overhead", "Analytic overhead per obfuscation level");
  overhead->add_option("--topology", a.topology)->required();
  overhead->add_option("--level", a.level)->required();
  overhead->add_option("--samples", a.samples, "Router subsets (0 = all)");
  overhead->add_option("--seed", a.seed);
  overhead->add_option("--stages", a.stages)->check(CLI::IsMember({1, 2}));
  overhead->add_option("--bus-width", a.bus_width)->check(CLI::PositiveNumber);
  overhead->add_flag("--cap", a.cap);
  overhead->add_option("--out", a.out);

  auto* export_cmd = app.add_subcommand("export", "Export to other formats");
  export_cmd->require_subcommand(1);
  auto* export_dot = export_cmd->add_subcommand("dot", "Graphviz rendering of a topology");
  export_dot->add_option("--topology", a.topology);
  export_dot->add_option("--design", a.design, "Render the topology a key induces");
  export_dot->add_option("--key", a.key);
  export_dot->add_option("--out", a.out);
  auto* export_cnf = export_cmd->add_subcommand("cnf", "DIMACS encoding of a netlist");
  export_cnf->add_option("--netlist", a.netlist)->required();
  export_cnf->add_option("--copies", a.copies)->check(CLI::IsMember({1, 2}));
  export_cnf->add_option("--out", a.out);

  auto* solve_cnf = app.add_subcommand("solve-cnf", "Solve a DIMACS file with the built-in CDCL engine");
  std::string cnf_path;
  solve_cnf->add_option("file", cnf_path)->required();

  std::vector<const char*> argv{"topoveil"};
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "topoveil: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*validate_cmd) {
      const auto t = topology_from_json(read_file(a.topology));
      const auto rep = validate(t);
      nlohmann::json j = {{"functional", rep.functional()}, {"findings", nlohmann::json::array()}};
      for (const auto& f : rep.findings) j["findings"].push_back(to_string(f));
      out << j.dump(2) << '\n';
      return rep.functional() ? 0 : 1;
    }
    if (*generate) {
      if (a.kind == "router") {
        emit(a.out, serialize(avalon_router_fixture(a.size)), out);
        return 0;
      }
      if (a.kind == "netlist") {
        RandomNetlistOptions ro;
        ro.inputs = a.size;
        ro.outputs = a.size;
        ro.gates = 6 * a.size;
        emit(a.out, serialize(random_netlist(a.seed, ro)), out);
        return 0;
      }
      Topology t;
      if (a.kind == "tree") {
        t = example_tree_soc();
      } else if (a.kind == "star") {
        t = star_topology(a.size);
      } else {
        t = random_topology(a.seed);
      }
      emit(a.out, to_json(t), out);
      return 0;
    }
    if (*obnocs) {
      const auto t = topology_from_json(read_file(a.topology));
      std::set<NodeId> routers;
      if (!a.level.empty()) {
        const auto level = level_from_string(a.level);
        if (!level) throw CLI::ValidationError("--level", "must be one of 0, I, II, III, IV");
        routers = level_routers(t, *level, a.cap, a.seed);
      } else {
        for (const auto& r : split(a.routers, ',')) routers.insert(r);
      }
      InsertOptions io;
      io.stages = a.stages;
      io.seed = a.seed;
      io.shuffle = !a.no_shuffle;
      const auto ob = insert_switches(t, routers, io);
      emit(a.out, to_json(ob.design), out);
      if (!a.ap_out.empty()) write_file(a.ap_out, format_key_file(ob.activation_package));
      if (!a.out.empty()) {
        out << "key_length=" << ob.design.key_length << " lanes=" << ob.design.lane_count()
            << " ap=" << ob.activation_package.to_hex() << '\n';
      }
      return 0;
    }
    if (*potent) {
      const auto pre = parse_netlist(read_file(a.netlist));
      const Netlist post = a.post.empty() ? synthesize_lite(pre) : parse_netlist(read_file(a.post));
      const auto m_pre = extract_connectivity(pre, grouping_from_ports(pre, a.router));
      const auto m_post = extract_connectivity(post, grouping_from_ports(post, a.router, true));
      const auto m_final = merge_connectivity(m_pre, m_post);
      const auto sw = generate_switch(m_final, a.key_width > 0 ? std::optional<int>(a.key_width) : std::nullopt);
      const auto res = integrate(pre, sw, a.correct_key, m_final);
      emit(a.out, serialize(res.netlist), out);
      if (!a.switch_out.empty()) write_file(a.switch_out, to_json(res.sw));
      if (!a.matrix_out.empty()) write_file(a.matrix_out, to_csv(res.matrix));
      if (!a.out.empty()) {
        out << "signals=" << res.sw.n() << " key_width=" << res.sw.key_width
            << " permutations=" << res.sw.permutations() << '\n';
      }
      return 0;
    }
    if (*induce) {
      const auto d = design_from_json(read_file(a.design));
      emit(a.out, to_json(induce_topology(d, read_key(a.key))), out);
      return 0;
    }
    if (*enumerate) {
      const auto d = design_from_json(read_file(a.design));
      EnumerateOptions eo;
      eo.cap_bits = a.enum_cap;
      eo.seed = a.seed;
      if (a.enum_samples > 0) eo.samples = a.enum_samples;
      std::optional<Topology> intended;
      if (!a.ap.empty()) intended = induce_topology(d, read_key(a.ap));
      const auto count = count_legal(d, eo);
      out << "legal=" << count.enumerated << " formula=" << count.formula.str();
      if (!count.exhaustive) out << " sampled=" << count.keys_visited;
      out << '\n';
      if (!a.out.empty()) {
        nlohmann::json j = nlohmann::json::array();
        for_each_key(d, intended ? &*intended : nullptr, eo, [&](const KeyRecord& r) {
          j.push_back({{"key_hex", r.key.to_hex()},
                       {"class", std::string(to_string(r.cls))},
                       {"digest", hex64(r.digest)}});
        });
        write_file(a.out, j.dump(2) + "\n");
      }
      return 0;
    }
    if (*load_ap) {
      const auto ap = read_key(a.ap);
      const auto [reg, trace] = load_package(SipoRegister::reset(ap.size()), ap);
      emit(a.out, trace_to_csv(trace), out);
      return 0;
    }
    if (*elaborate_cmd) {
      Netlist n;
      if (a.sipo > 0) {
        n = elaborate_sipo(static_cast<std::size_t>(a.sipo));
      } else if (!a.design.empty()) {
        n = elaborate(design_from_json(read_file(a.design)), a.bus_width);
      } else {
        throw CLI::RequiredError("--design or --sipo");
      }
      emit(a.out, serialize(n), out);
      return 0;
    }
    if (*optimize) {
      auto n = parse_netlist(read_file(a.netlist));
      if (!a.drop.empty()) {
        const auto names = split(a.drop, ',');
        n = drop_outputs(n, std::set<std::string>(names.begin(), names.end()));
      }
      emit(a.out, serialize(synthesize_lite(n)), out);
      return 0;
    }
    if (*connectivity) {
      const auto pre = parse_netlist(read_file(a.netlist));
      std::optional<Netlist> post;
      if (!a.post.empty()) post = parse_netlist(read_file(a.post));
      if (a.synthesize) post = synthesize_lite(pre);
      auto m = extract_connectivity(pre, grouping_from_ports(pre, a.router));
      if (post) m = merge_connectivity(m, extract_connectivity(*post, grouping_from_ports(*post, a.router, true)));
      emit(a.out, to_csv(m), out);
      return 0;
    }
    if (*attack_sat || *attack_brute) {
      const auto locked = parse_netlist(read_file(a.netlist));
      const Ground g = ground_truth(a);
      auto oracle = make_oracle(a, locked, g);
      AttackResult r;
      if (*attack_sat) {
        AttackOptions ao;
        ao.budget = a.budget;
        ao.engine = a.engine;
        ao.seed = a.seed;
        r = sat_attack(locked, *oracle, ao);
      } else {
        BruteForceOptions bo;
        bo.seed = a.seed;
        r = brute_force_attack(locked, *oracle, bo);
      }
      evaluate(r, locked, g.gt);
      emit(a.out, report_json(r), out);
      if (!a.out.empty()) {
        out << "verdict=" << to_string(*r.verdict) << " dip_count=" << r.dip_count
            << " key=" << r.recovered_key.to_hex() << '\n';
      }
      return 0;
    }
    if (*simulate) {
      const auto d = design_from_json(read_file(a.design));
      const auto ap = read_key(a.ap);
      const auto w = workload_from_json(read_file(a.workload));
      const auto bench = make_bench(d, ap, a.alu);
      const auto cov = check_coverage(bench, w);
      const auto keys = read_key_list(a.keys, d.key_length);
      const auto golden = run_dut(bench, ap, w);
      const auto rep = compare_runs(golden, run_duts(bench, keys, w));
      auto j = nlohmann::json::parse(to_json(rep));
      j["coverage"] = {{"redacted", cov.redacted.size()}, {"exercised", cov.exercised.size()}, {"complete", cov.complete()}};
      emit(a.out, j.dump(2) + "\n", out);
      if (!a.out.empty()) {
        out << "match=" << rep.match << " functional-mismatch=" << rep.functional_mismatch
            << " silent=" << rep.silent << '\n';
      }
      return 0;
    }
    if (*overhead) {
      const auto t = topology_from_json(read_file(a.topology));
      const auto level = level_from_string(a.level);
      if (!level) throw CLI::ValidationError("--level", "must be one of 0, I, II, III, IV");
      OverheadOptions oo;
      oo.stages = a.stages;
      oo.bus_width = a.bus_width;
      oo.samples = a.samples;
      oo.seed = a.seed;
      oo.cap = a.cap;
      emit(a.out, to_json(overhead_report(t, *level, oo)), out);
      return 0;
    }
    if (*export_dot) {
      Topology t;
      if (!a.design.empty()) {
        if (a.key.empty()) throw CLI::RequiredError("--key");
        t = induce_topology(design_from_json(read_file(a.design)), read_key(a.key));
      } else if (!a.topology.empty()) {
        t = topology_from_json(read_file(a.topology));
      } else {
        throw CLI::RequiredError("--topology or --design");
      }
      emit(a.out, to_dot(t), out);
      return 0;
    }
    if (*export_cnf) {
      const auto n = parse_netlist(read_file(a.netlist));
      emit(a.out, to_cnf(n, a.copies).to_dimacs(), out);
      return 0;
    }
    if (*solve_cnf) {
      const auto d = parse_dimacs(read_file(cnf_path));
      CdclSolver s;
      for (int v = 0; v < d.vars; ++v) s.new_var();
      for (const auto& c : d.clauses) s.add_clause(c);
      out << competition_output(s.solve(), s);
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    err << "topoveil: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "topoveil: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "topoveil: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace topoveil
