#include "topoveil/obnocs.hpp"

#include <algorithm>
#include <bit>
#include <mutex>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "json_io.hpp"
#include "topoveil/error.hpp"
#include "topoveil/prng.hpp"

namespace topoveil {

std::string_view to_string(SwitchSide s) {
  return s == SwitchSide::SourceDemux ? "source-demux" : "dest-mux";
}

std::size_t ObfuscatedDesign::lane_count() const {
  std::size_t n = 0;
  for (const auto& g : groups) n += g.lanes.size();
  return n;
}

int select_width(std::size_t candidates) {
  if (candidates <= 2) return 1;
  return static_cast<int>(std::bit_width(candidates - 1));
}

namespace {

void check_port(const Topology& t, const Endpoint& e, bool out_port, std::string_view what) {
  const Node* n = t.find(e.node);
  const int count = n == nullptr ? 0 : (out_port ? n->out_ports : n->in_ports);
  if (n == nullptr || e.port < 0 || e.port >= count) {
    throw Error(ErrorCode::BadExtension, std::string(what) + " " + to_string(e) + " is not an out-port");
  }
}

Lane make_lane(std::string id, Endpoint target, std::vector<Endpoint> candidates) {
  Lane lane{std::move(id), std::move(target), std::move(candidates), 1};
  lane.width = select_width(lane.candidates.size());
  return lane;
}

}  // namespace

Obfuscation insert_switches(const Topology& t, const std::set<NodeId>& routers, const InsertOptions& opts) {
  if (opts.stages != 1 && opts.stages != 2) {
    throw Error(ErrorCode::BadStages, "stages must be 1 or 2, got " + std::to_string(opts.stages));
  }
  if (!validate(t).structurally_sound()) {
    throw Error(ErrorCode::InvalidTopology, "topology has unknown nodes or ports");
  }
  for (const auto& r : routers) {
    const Node* n = t.find(r);
    if (n == nullptr || n->kind != NodeKind::Router) throw Error(ErrorCode::RouterNotFound, r);
    if (t.out_links(r).size() < 2) {
      throw Error(ErrorCode::DegreeTooSmall, r + " has fewer than two out-links");
    }
  }
  for (const auto& [r, extra] : opts.extensions) {
    if (!routers.count(r)) throw Error(ErrorCode::BadExtension, "extension for unselected router " + r);
    for (const auto& e : extra) check_port(t, e, true, "extension");
  }

  Obfuscation out;
  ObfuscatedDesign& d = out.design;
  d.stages = opts.stages;
  d.base = t;
  SplitMix64 master(opts.seed);

  // Builds a group from (target, original source) pairs over a shared
  // candidate list, shuffling each lane's wiring independently.
  auto emit = [&](const NodeId& r, SwitchSide side, const std::vector<Link>& links,
                  std::vector<Endpoint> candidates) {
    std::sort(candidates.begin(), candidates.end());
    SwitchGroup g{r, side, {}, 0};
    const std::uint64_t derived = master.next();
    if (opts.shuffle) g.wiring_seed = derived;
    SplitMix64 rng(g.wiring_seed);
    const char* tag = side == SwitchSide::SourceDemux ? ".demux." : ".mux.";
    for (std::size_t i = 0; i < links.size(); ++i) {
      std::vector<Endpoint> wired = candidates;
      if (opts.shuffle) fisher_yates(std::span<Endpoint>(wired), rng);
      Lane lane = make_lane(r + tag + std::to_string(i), links[i].dst, std::move(wired));
      const auto pos = std::find(lane.candidates.begin(), lane.candidates.end(), links[i].src);
      const auto code = static_cast<std::uint64_t>(pos - lane.candidates.begin());
      out.activation_package.append(BitString::from_uint(code, lane.width));
      d.base.remove_link(links[i]);
      g.lanes.push_back(std::move(lane));
    }
    d.groups.push_back(std::move(g));
  };

  for (const auto& r : routers) {
    const auto outs = t.out_links(r);
    std::vector<Endpoint> sources;
    for (const auto& l : outs) sources.push_back(l.src);
    if (auto it = opts.extensions.find(r); it != opts.extensions.end()) {
      for (const auto& e : it->second) {
        if (std::find(sources.begin(), sources.end(), e) == sources.end()) sources.push_back(e);
      }
    }
    emit(r, SwitchSide::SourceDemux, outs, std::move(sources));

    if (opts.stages == 2) {
      std::vector<Link> eligible;
      for (const auto& l : t.in_links(r)) {
        if (!routers.count(l.src.node)) eligible.push_back(l);
      }
      if (eligible.size() >= 2) {
        std::vector<Endpoint> srcs;
        for (const auto& l : eligible) srcs.push_back(l.src);
        emit(r, SwitchSide::DestMux, eligible, std::move(srcs));
      }
    }
  }
  d.key_length = out.activation_package.size();
  return out;
}

std::vector<std::uint64_t> lane_codes(const ObfuscatedDesign& d, const BitString& key) {
  if (key.size() != d.key_length) {
    throw Error(ErrorCode::KeyLengthMismatch, "key has " + std::to_string(key.size()) + " bits, design expects " +
                                                  std::to_string(d.key_length));
  }
  std::vector<std::uint64_t> codes;
  std::size_t off = 0;
  for (const auto& g : d.groups) {
    for (const auto& lane : g.lanes) {
      codes.push_back(key.slice_uint(off, lane.width));
      off += lane.width;
    }
  }
  return codes;
}

Topology induce_topology(const ObfuscatedDesign& d, const BitString& key) {
  const auto codes = lane_codes(d, key);
  Topology t = d.base;
  std::size_t i = 0;
  for (const auto& g : d.groups) {
    for (const auto& lane : g.lanes) {
      const auto c = codes[i++];
      if (c < lane.candidates.size()) t.add_link(lane.candidates[c], lane.target);
    }
  }
  return t;
}

namespace {

/// Classifies keys from lane codes without materializing a Topology. Only
/// endpoints touched by some lane can change their link count, so the check
/// runs over that small set.
class FastClassifier {
 public:
  FastClassifier(const ObfuscatedDesign& d, const Topology* intended) : d_(d) {
    if (intended != nullptr) {
      bool same = intended->nodes().size() == d.base.nodes().size();
      for (const auto& [id, n] : d.base.nodes()) same = same && intended->has_node(id);
      if (!same) throw Error(ErrorCode::NodeSetMismatch, "intended topology has different nodes");
      intended_ = intended;
      intended_digest_ = topology_digest(*intended);
    }
    auto in_range = [&](const Endpoint& e, bool out) {
      const Node* n = d.base.find(e.node);
      return n != nullptr && e.port >= 0 && e.port < (out ? n->out_ports : n->in_ports);
    };
    for (const auto& g : d.groups) {
      for (const auto& lane : g.lanes) {
        if (!in_range(lane.target, false)) base_ok_ = false;
        LaneInfo li{slot(in_index_, lane.target), {}, lane.width};
        // A dangling candidate makes its code non-functional.
        for (const auto& c : lane.candidates) li.cands.push_back(in_range(c, true) ? slot(out_index_, c) : -1);
        lanes_.push_back(std::move(li));
      }
    }
    if (!validate(d.base).structurally_sound()) base_ok_ = false;
    base_in_.assign(in_index_.size(), 0);
    base_out_.assign(out_index_.size(), 0);

    // Endpoint counts in the base; anything off-lane must already be exact.
    std::map<Endpoint, int> ins, outs;
    for (const auto& l : d.base.links()) {
      ++ins[l.dst];
      ++outs[l.src];
    }
    for (const auto& [id, n] : d.base.nodes()) {
      for (int p = 0; p < n.in_ports; ++p) {
        const Endpoint e{id, p};
        const int c = ins.count(e) ? ins[e] : 0;
        if (auto it = in_index_.find(e); it != in_index_.end()) {
          base_in_[it->second] = c;
        } else if (c != 1) {
          base_ok_ = false;
        }
      }
      for (int p = 0; p < n.out_ports; ++p) {
        const Endpoint e{id, p};
        const int c = outs.count(e) ? outs[e] : 0;
        if (auto it = out_index_.find(e); it != out_index_.end()) {
          base_out_[it->second] = c;
        } else if (c != 1) {
          base_ok_ = false;
        }
      }
    }
  }

  std::size_t lanes() const { return lanes_.size(); }

  void codes_from_uint(std::uint64_t k, std::vector<std::uint64_t>& codes) const {
    codes.resize(lanes_.size());
    std::size_t shift = d_.key_length;
    for (std::size_t i = 0; i < lanes_.size(); ++i) {
      shift -= lanes_[i].width;
      codes[i] = (k >> shift) & ((std::uint64_t{1} << lanes_[i].width) - 1);
    }
  }

  bool functional(const std::vector<std::uint64_t>& codes, std::vector<int>& in,
                  std::vector<int>& out) const {
    if (!base_ok_) return false;
    in = base_in_;
    out = base_out_;
    for (std::size_t i = 0; i < lanes_.size(); ++i) {
      const auto& li = lanes_[i];
      if (codes[i] >= li.cands.size() || li.cands[codes[i]] < 0) return false;
      ++in[li.target];
      ++out[li.cands[codes[i]]];
    }
    for (int c : in) {
      if (c != 1) return false;
    }
    for (int c : out) {
      if (c != 1) return false;
    }
    return true;
  }

  std::vector<Link> links(const std::vector<std::uint64_t>& codes) const {
    std::vector<Link> ls = d_.base.links();
    std::size_t i = 0;
    for (const auto& g : d_.groups) {
      for (const auto& lane : g.lanes) {
        const auto c = codes[i++];
        if (c < lane.candidates.size()) ls.push_back(Link{lane.candidates[c], lane.target});
      }
    }
    std::sort(ls.begin(), ls.end());
    return ls;
  }

  TopologyClass classify(bool functional, const std::vector<Link>& ls, std::uint64_t digest) const {
    if (intended_ != nullptr && digest == intended_digest_ && ls == intended_->links()) {
      return TopologyClass::Intended;
    }
    return functional ? TopologyClass::LegalAlternate : TopologyClass::NonFunctional;
  }

 private:
  struct LaneInfo {
    int target;
    std::vector<int> cands;
    int width;
  };

  static int slot(std::map<Endpoint, int>& index, const Endpoint& e) {
    auto [it, inserted] = index.emplace(e, static_cast<int>(index.size()));
    return it->second;
  }

  const ObfuscatedDesign& d_;
  const Topology* intended_ = nullptr;
  std::uint64_t intended_digest_ = 0;
  std::map<Endpoint, int> in_index_, out_index_;
  std::vector<LaneInfo> lanes_;
  std::vector<int> base_in_, base_out_;
  bool base_ok_ = true;
};

bool exhaustive(const ObfuscatedDesign& d, const EnumerateOptions& opts) {
  if (d.key_length <= opts.cap_bits && d.key_length < 64) return true;
  if (!opts.samples) {
    throw Error(ErrorCode::KeyspaceTooLarge, std::to_string(d.key_length) + "-bit key exceeds the " +
                                                 std::to_string(opts.cap_bits) + "-bit enumeration cap");
  }
  return false;
}

BitString random_key(std::size_t width, SplitMix64& rng) {
  BitString k(width);
  for (std::size_t off = 0; off < width; off += 64) {
    const std::size_t n = std::min<std::size_t>(64, width - off);
    k.write_uint(off, n, n == 64 ? rng.next() : rng.next() & ((std::uint64_t{1} << n) - 1));
  }
  return k;
}

}  // namespace

void for_each_key(const ObfuscatedDesign& d, const Topology* intended, const EnumerateOptions& opts,
                  const std::function<void(const KeyRecord&)>& visit) {
  const FastClassifier fc(d, intended);
  std::vector<std::uint64_t> codes;
  std::vector<int> in, out;
  auto emit = [&](BitString key) {
    const bool f = fc.functional(codes, in, out);
    const auto ls = fc.links(codes);
    const auto digest = links_digest(ls);
    visit(KeyRecord{std::move(key), fc.classify(f, ls, digest), digest});
  };
  if (exhaustive(d, opts)) {
    const std::uint64_t n = std::uint64_t{1} << d.key_length;
    for (std::uint64_t k = 0; k < n; ++k) {
      fc.codes_from_uint(k, codes);
      emit(BitString::from_uint(k, d.key_length));
    }
    return;
  }
  SplitMix64 rng(opts.seed);
  for (std::uint64_t s = 0; s < *opts.samples; ++s) {
    BitString key = random_key(d.key_length, rng);
    codes = lane_codes(d, key);
    emit(std::move(key));
  }
}

std::vector<KeyRecord> enumerate_keys(const ObfuscatedDesign& d, const Topology* intended,
                                      const EnumerateOptions& opts) {
  std::vector<KeyRecord> out;
  for_each_key(d, intended, opts, [&](const KeyRecord& r) { out.push_back(r); });
  return out;
}

BigInt legal_formula(const ObfuscatedDesign& d) {
  BigInt total = 1;
  for (const auto& g : d.groups) {
    if (g.lanes.empty()) continue;
    // Every lane of a group shares one candidate set.
    BigInt f = 1;
    for (std::size_t i = 2; i <= g.lanes.front().candidates.size(); ++i) f *= i;
    total *= f;
  }
  return total;
}

LegalCount count_legal(const ObfuscatedDesign& d, const EnumerateOptions& opts) {
  LegalCount result;
  result.formula = legal_formula(d);
  const FastClassifier fc(d, nullptr);
  std::set<std::uint64_t> digests;

  if (!exhaustive(d, opts)) {
    result.exhaustive = false;
    SplitMix64 rng(opts.seed);
    std::vector<int> in, out;
    for (std::uint64_t s = 0; s < *opts.samples; ++s) {
      const auto codes = lane_codes(d, random_key(d.key_length, rng));
      if (fc.functional(codes, in, out)) digests.insert(links_digest(fc.links(codes)));
    }
    result.keys_visited = *opts.samples;
    result.enumerated = digests.size();
    return result;
  }

  const std::uint64_t n = std::uint64_t{1} << d.key_length;
  unsigned threads = opts.threads != 0 ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(1, n >> 12)));
  std::vector<std::vector<std::uint64_t>> found(threads);
  auto work = [&](unsigned t) {
    std::vector<std::uint64_t> codes;
    std::vector<int> in, out;
    std::unordered_set<std::uint64_t> local;
    const std::uint64_t lo = n * t / threads, hi = n * (t + 1) / threads;
    for (std::uint64_t k = lo; k < hi; ++k) {
      fc.codes_from_uint(k, codes);
      if (fc.functional(codes, in, out)) local.insert(links_digest(fc.links(codes)));
    }
    found[t].assign(local.begin(), local.end());
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
  }
  for (const auto& f : found) digests.insert(f.begin(), f.end());
  result.keys_visited = n;
  result.enumerated = digests.size();
  return result;
}

std::optional<BitString> recover_key_for(const ObfuscatedDesign& d, const Topology& target) {
  if (target.nodes().size() != d.base.nodes().size() ||
      !std::equal(target.nodes().begin(), target.nodes().end(), d.base.nodes().begin(),
                  [](const auto& a, const auto& b) { return a.first == b.first; })) {
    throw Error(ErrorCode::NodeSetMismatch, "target topology has different nodes");
  }
  if (target.nodes() != d.base.nodes()) return std::nullopt;
  std::map<Endpoint, std::vector<Endpoint>> drivers;
  for (const auto& l : target.links()) drivers[l.dst].push_back(l.src);

  BitString key;
  std::vector<Link> used;
  for (const auto& g : d.groups) {
    for (const auto& lane : g.lanes) {
      const auto it = drivers.find(lane.target);
      std::uint64_t code = lane.candidates.size();  // lowest unused code
      for (const auto& src : it == drivers.end() ? std::vector<Endpoint>{} : it->second) {
        const auto pos = std::find(lane.candidates.begin(), lane.candidates.end(), src);
        if (pos != lane.candidates.end()) {
          code = static_cast<std::uint64_t>(pos - lane.candidates.begin());
          used.push_back(Link{src, lane.target});
          break;
        }
      }
      if (code >= (std::uint64_t{1} << lane.width)) return std::nullopt;
      key.append(BitString::from_uint(code, lane.width));
    }
  }
  if (topology_equal(induce_topology(d, key), target)) return key;
  return std::nullopt;
}

// --- serialization ---------------------------------------------------------

std::string to_json(const ObfuscatedDesign& d) {
  using detail::json;
  json groups = json::array();
  for (const auto& g : d.groups) {
    json lanes = json::array();
    for (const auto& lane : g.lanes) {
      json cands = json::array();
      for (const auto& c : lane.candidates) cands.push_back(detail::endpoint_to_json(c));
      lanes.push_back({{"id", lane.id},
                       {"target", detail::endpoint_to_json(lane.target)},
                       {"width", lane.width},
                       {"candidates", cands}});
    }
    groups.push_back({{"router", g.router},
                      {"side", std::string(to_string(g.side))},
                      {"wiring_seed", g.wiring_seed},
                      {"lanes", lanes}});
  }
  json j = {{"format", "topoveil-obnocs"},
            {"stages", d.stages},
            {"key_length", d.key_length},
            {"base", detail::topology_to_json_value(d.base)},
            {"groups", groups}};
  return detail::dump(j);
}

ObfuscatedDesign design_from_json(std::string_view text) {
  using detail::get_field;
  using detail::json;
  const json j = detail::parse_json(text, "design");
  if (get_field<std::string>(j, "format", "design") != "topoveil-obnocs") {
    throw Error(ErrorCode::SchemaError, "design: unexpected format tag");
  }
  ObfuscatedDesign d;
  d.stages = get_field<int>(j, "stages", "design");
  if (d.stages != 1 && d.stages != 2) throw Error(ErrorCode::BadStages, "design: stages");
  d.key_length = get_field<std::size_t>(j, "key_length", "design");
  d.base = detail::topology_from_json_value(j.at("base"));
  std::size_t bits = 0;
  for (const auto& gj : get_field<json>(j, "groups", "design")) {
    SwitchGroup g;
    g.router = get_field<std::string>(gj, "router", "group");
    const auto side = get_field<std::string>(gj, "side", "group");
    if (side == "source-demux") {
      g.side = SwitchSide::SourceDemux;
    } else if (side == "dest-mux") {
      g.side = SwitchSide::DestMux;
    } else {
      throw Error(ErrorCode::SchemaError, "group: unknown side " + side);
    }
    g.wiring_seed = get_field<std::uint64_t>(gj, "wiring_seed", "group");
    for (const auto& lj : get_field<json>(gj, "lanes", "group")) {
      Lane lane;
      lane.id = get_field<std::string>(lj, "id", "lane");
      lane.target = detail::endpoint_from_json(lj.at("target"));
      lane.width = get_field<int>(lj, "width", "lane");
      for (const auto& cj : get_field<json>(lj, "candidates", "lane")) {
        lane.candidates.push_back(detail::endpoint_from_json(cj));
      }
      if (lane.candidates.empty() || lane.width != select_width(lane.candidates.size())) {
        throw Error(ErrorCode::SchemaError, "lane " + lane.id + ": width does not match candidates");
      }
      bits += lane.width;
      g.lanes.push_back(std::move(lane));
    }
    d.groups.push_back(std::move(g));
  }
  if (bits != d.key_length) throw Error(ErrorCode::SchemaError, "design: key_length does not match lanes");
  return d;
}

}  // namespace topoveil
