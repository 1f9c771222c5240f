#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace topoveil {

using NodeId = std::string;

enum class NodeKind { Router, IP };

struct Node {
  NodeId id;
  NodeKind kind = NodeKind::Router;
  int in_ports = 0;
  int out_ports = 0;

  bool operator==(const Node&) const = default;
};

/// A (node, port index) pair. Whether it names an in- or out-port depends on
/// which end of a link it sits.
struct Endpoint {
  NodeId node;
  int port = 0;

  auto operator<=>(const Endpoint&) const = default;
  bool operator==(const Endpoint&) const = default;
};

std::string to_string(const Endpoint& e);

/// Unidirectional link from an out-port to an in-port. Bidirectional channels
/// are two links; bus width is a netlist concern.
struct Link {
  Endpoint src;
  Endpoint dst;

  auto operator<=>(const Link&) const = default;
  bool operator==(const Link&) const = default;
};

enum class TopologyClass { Intended, LegalAlternate, NonFunctional };
std::string_view to_string(TopologyClass c);

/// Port-indexed directed graph of routers and IP blocks. Nodes are kept sorted
/// by id and links in canonical (sorted) order so that equality and digests
/// are labeled and order-independent.
class Topology {
 public:
  Topology() = default;
  explicit Topology(std::string label) : label_(std::move(label)) {}

  const std::string& label() const noexcept { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }

  /// Adds or replaces a node.
  void add_node(Node node);
  void add_link(Link link);
  void add_link(Endpoint src, Endpoint dst) { add_link(Link{std::move(src), std::move(dst)}); }
  bool remove_link(const Link& link);

  const std::map<NodeId, Node>& nodes() const noexcept { return nodes_; }
  const std::vector<Link>& links() const noexcept { return links_; }
  const Node* find(std::string_view id) const;
  bool has_node(std::string_view id) const { return find(id) != nullptr; }

  std::vector<Link> out_links(std::string_view node) const;
  std::vector<Link> in_links(std::string_view node) const;

  std::vector<NodeId> router_ids() const;

 private:
  std::string label_;
  std::map<NodeId, Node> nodes_;
  std::vector<Link> links_;  // sorted
};

struct Finding {
  enum class Kind {
    UnknownNode,      // link endpoint names a node that does not exist
    PortOutOfRange,   // port index outside the node's declared count
    DanglingIn,       // in-port with no driver
    DanglingOut,      // out-port driving nothing
    MultiDriven,      // in-port with more than one driver
    MultiDriving,     // out-port driving more than one in-port
  };
  Kind kind;
  Endpoint where;

  auto operator<=>(const Finding&) const = default;
  bool operator==(const Finding&) const = default;
};
std::string_view to_string(Finding::Kind k);
std::string to_string(const Finding& f);

struct ValidationReport {
  std::vector<Finding> findings;

  bool functional() const noexcept { return findings.empty(); }
  bool structurally_sound() const;  // no UnknownNode / PortOutOfRange
  bool contains(Finding::Kind kind, const Endpoint& where) const;
};

struct Degree {
  int in = 0;
  int out = 0;
  bool operator==(const Degree&) const = default;
};
using DegreeSignature = std::map<NodeId, Degree>;

ValidationReport validate(const Topology& t);

/// Link counts per node. Throws InvalidTopology unless `t` is functional.
DegreeSignature degree_signature(const Topology& t);

/// Degree-equal and functional. Throws NodeSetMismatch if node ids differ.
bool is_legal(const Topology& candidate, const Topology& intended);

/// Labeled equality of node and link sets; the label string is ignored.
bool topology_equal(const Topology& a, const Topology& b);

TopologyClass classify(const Topology& candidate, const Topology& intended);

/// FNV-1a digest of the canonical sorted link list.
std::uint64_t topology_digest(const Topology& t);
/// Same digest over an already sorted link list.
std::uint64_t links_digest(const std::vector<Link>& sorted_links);

std::string to_json(const Topology& t);
Topology topology_from_json(std::string_view text);
std::string to_dot(const Topology& t);

}  // namespace topoveil
