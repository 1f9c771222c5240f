#include "topoveil/topology.hpp"

#include <algorithm>
#include <set>
#include <tuple>
#include <sstream>

#include "json_io.hpp"
#include "topoveil/error.hpp"
#include "topoveil/prng.hpp"

namespace topoveil {

std::string to_string(const Endpoint& e) { return e.node + "." + std::to_string(e.port); }

std::string_view to_string(TopologyClass c) {
  switch (c) {
    case TopologyClass::Intended: return "intended";
    case TopologyClass::LegalAlternate: return "legal-alternate";
    case TopologyClass::NonFunctional: return "non-functional";
  }
  return "?";
}

void Topology::add_node(Node node) {
  if (node.id.empty()) throw Error(ErrorCode::InvalidTopology, "empty node id");
  if (node.in_ports < 0 || node.out_ports < 0) {
    throw Error(ErrorCode::InvalidTopology, "negative port count on " + node.id);
  }
  nodes_[node.id] = std::move(node);
}

void Topology::add_link(Link link) {
  auto it = std::lower_bound(links_.begin(), links_.end(), link);
  links_.insert(it, std::move(link));
}

bool Topology::remove_link(const Link& link) {
  auto it = std::lower_bound(links_.begin(), links_.end(), link);
  if (it == links_.end() || *it != link) return false;
  links_.erase(it);
  return true;
}

const Node* Topology::find(std::string_view id) const {
  auto it = nodes_.find(std::string(id));
  return it == nodes_.end() ? nullptr : &it->second;
}

std::vector<Link> Topology::out_links(std::string_view node) const {
  std::vector<Link> out;
  for (const auto& l : links_) {
    if (l.src.node == node) out.push_back(l);
  }
  std::sort(out.begin(), out.end(),
            [](const Link& a, const Link& b) { return std::tie(a.src, a.dst) < std::tie(b.src, b.dst); });
  return out;
}

std::vector<Link> Topology::in_links(std::string_view node) const {
  std::vector<Link> in;
  for (const auto& l : links_) {
    if (l.dst.node == node) in.push_back(l);
  }
  std::sort(in.begin(), in.end(),
            [](const Link& a, const Link& b) { return std::tie(a.dst, a.src) < std::tie(b.dst, b.src); });
  return in;
}

std::vector<NodeId> Topology::router_ids() const {
  std::vector<NodeId> ids;
  for (const auto& [id, n] : nodes_) {
    if (n.kind == NodeKind::Router) ids.push_back(id);
  }
  return ids;
}

std::string_view to_string(Finding::Kind k) {
  switch (k) {
    case Finding::Kind::UnknownNode: return "UnknownNode";
    case Finding::Kind::PortOutOfRange: return "PortOutOfRange";
    case Finding::Kind::DanglingIn: return "DanglingIn";
    case Finding::Kind::DanglingOut: return "DanglingOut";
    case Finding::Kind::MultiDriven: return "MultiDriven";
    case Finding::Kind::MultiDriving: return "MultiDriving";
  }
  return "?";
}

std::string to_string(const Finding& f) {
  return std::string(to_string(f.kind)) + "(" + f.where.node + "." + std::to_string(f.where.port) + ")";
}

bool ValidationReport::structurally_sound() const {
  return std::none_of(findings.begin(), findings.end(), [](const Finding& f) {
    return f.kind == Finding::Kind::UnknownNode || f.kind == Finding::Kind::PortOutOfRange;
  });
}

bool ValidationReport::contains(Finding::Kind kind, const Endpoint& where) const {
  return std::find(findings.begin(), findings.end(), Finding{kind, where}) != findings.end();
}

ValidationReport validate(const Topology& t) {
  std::set<Finding> found;
  std::map<Endpoint, int> drivers;  // in-port -> count
  std::map<Endpoint, int> fanout;   // out-port -> count

  auto check_end = [&](const Endpoint& e, bool is_out) {
    const Node* n = t.find(e.node);
    if (n == nullptr) {
      found.insert({Finding::Kind::UnknownNode, e});
      return false;
    }
    const int limit = is_out ? n->out_ports : n->in_ports;
    if (e.port < 0 || e.port >= limit) {
      found.insert({Finding::Kind::PortOutOfRange, e});
      return false;
    }
    return true;
  };

  for (const auto& l : t.links()) {
    if (check_end(l.src, true)) ++fanout[l.src];
    if (check_end(l.dst, false)) ++drivers[l.dst];
  }
  for (const auto& [id, n] : t.nodes()) {
    for (int p = 0; p < n.in_ports; ++p) {
      const Endpoint e{id, p};
      auto it = drivers.find(e);
      const int c = it == drivers.end() ? 0 : it->second;
      if (c == 0) found.insert({Finding::Kind::DanglingIn, e});
      if (c > 1) found.insert({Finding::Kind::MultiDriven, e});
    }
    for (int p = 0; p < n.out_ports; ++p) {
      const Endpoint e{id, p};
      auto it = fanout.find(e);
      const int c = it == fanout.end() ? 0 : it->second;
      if (c == 0) found.insert({Finding::Kind::DanglingOut, e});
      if (c > 1) found.insert({Finding::Kind::MultiDriving, e});
    }
  }
  return ValidationReport{{found.begin(), found.end()}};
}

namespace {

DegreeSignature count_degrees(const Topology& t) {
  DegreeSignature sig;
  for (const auto& [id, n] : t.nodes()) sig[id] = Degree{};
  for (const auto& l : t.links()) {
    if (auto it = sig.find(l.src.node); it != sig.end()) ++it->second.out;
    if (auto it = sig.find(l.dst.node); it != sig.end()) ++it->second.in;
  }
  return sig;
}

void require_same_nodes(const Topology& a, const Topology& b) {
  const auto& na = a.nodes();
  const auto& nb = b.nodes();
  const bool same = na.size() == nb.size() &&
                    std::equal(na.begin(), na.end(), nb.begin(),
                               [](const auto& x, const auto& y) { return x.first == y.first; });
  if (!same) throw Error(ErrorCode::NodeSetMismatch, "candidate and intended node sets differ");
}

}  // namespace

DegreeSignature degree_signature(const Topology& t) {
  const auto report = validate(t);
  if (!report.functional()) {
    throw Error(ErrorCode::InvalidTopology,
                std::to_string(report.findings.size()) + " finding(s), first " +
                    to_string(report.findings.front()));
  }
  return count_degrees(t);
}

bool is_legal(const Topology& candidate, const Topology& intended) {
  require_same_nodes(candidate, intended);
  if (!validate(candidate).functional()) return false;
  return count_degrees(candidate) == count_degrees(intended);
}

bool topology_equal(const Topology& a, const Topology& b) {
  return a.nodes() == b.nodes() && a.links() == b.links();
}

TopologyClass classify(const Topology& candidate, const Topology& intended) {
  require_same_nodes(candidate, intended);
  if (topology_equal(candidate, intended)) return TopologyClass::Intended;
  if (is_legal(candidate, intended)) return TopologyClass::LegalAlternate;
  return TopologyClass::NonFunctional;
}

std::uint64_t topology_digest(const Topology& t) { return links_digest(t.links()); }

std::uint64_t links_digest(const std::vector<Link>& sorted_links) {
  std::uint64_t h = fnv1a64("");
  for (const auto& l : sorted_links) {
    std::string s = l.src.node + ":" + std::to_string(l.src.port) + ">" + l.dst.node + ":" +
                    std::to_string(l.dst.port) + ";";
    h = fnv1a64(s, h);
  }
  return h;
}

namespace detail {

json endpoint_to_json(const Endpoint& e) { return json::array({e.node, e.port}); }

Endpoint endpoint_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_string() || !j[1].is_number_integer()) {
    throw Error(ErrorCode::SchemaError, "endpoint must be [id, port]");
  }
  return Endpoint{j[0].get<std::string>(), j[1].get<int>()};
}

json topology_to_json_value(const Topology& t) {
  json nodes = json::array();
  for (const auto& [id, n] : t.nodes()) {
    nodes.push_back({{"id", id},
                     {"kind", n.kind == NodeKind::Router ? "router" : "ip"},
                     {"in_ports", n.in_ports},
                     {"out_ports", n.out_ports}});
  }
  json links = json::array();
  for (const auto& l : t.links()) {
    links.push_back({{"src", endpoint_to_json(l.src)}, {"dst", endpoint_to_json(l.dst)}});
  }
  return json{{"label", t.label()}, {"nodes", nodes}, {"links", links}};
}

Topology topology_from_json_value(const json& j) {
  constexpr std::string_view what = "topology";
  Topology t(j.contains("label") ? get_field<std::string>(j, "label", what) : std::string{});
  const auto nodes = get_field<json>(j, "nodes", what);
  const auto links = get_field<json>(j, "links", what);
  if (!nodes.is_array() || !links.is_array()) {
    throw Error(ErrorCode::SchemaError, "topology: nodes and links must be arrays");
  }
  for (const auto& n : nodes) {
    Node node;
    node.id = get_field<std::string>(n, "id", "node");
    const auto kind = get_field<std::string>(n, "kind", "node");
    if (kind == "router") {
      node.kind = NodeKind::Router;
    } else if (kind == "ip") {
      node.kind = NodeKind::IP;
    } else {
      throw Error(ErrorCode::SchemaError, "node kind must be router|ip, got " + kind);
    }
    node.in_ports = get_field<int>(n, "in_ports", "node");
    node.out_ports = get_field<int>(n, "out_ports", "node");
    if (t.has_node(node.id)) throw Error(ErrorCode::SchemaError, "duplicate node id " + node.id);
    t.add_node(std::move(node));
  }
  for (const auto& l : links) {
    t.add_link(endpoint_from_json(get_field<json>(l, "src", "link")),
               endpoint_from_json(get_field<json>(l, "dst", "link")));
  }
  return t;
}

}  // namespace detail

std::string to_json(const Topology& t) { return detail::dump(detail::topology_to_json_value(t)); }

Topology topology_from_json(std::string_view text) {
  return detail::topology_from_json_value(detail::parse_json(text, "topology"));
}

std::string to_dot(const Topology& t) {
  std::ostringstream out;
  out << "digraph \"" << t.label() << "\" {\n";
  for (const auto& [id, n] : t.nodes()) {
    out << "  \"" << id << "\" [shape=" << (n.kind == NodeKind::Router ? "box" : "ellipse") << "];\n";
  }
  for (const auto& l : t.links()) {
    out << "  \"" << l.src.node << "\" -> \"" << l.dst.node << "\" [taillabel=\"" << l.src.port
        << "\", headlabel=\"" << l.dst.port << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace topoveil
