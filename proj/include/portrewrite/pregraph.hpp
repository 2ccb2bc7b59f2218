#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "portrewrite/attributes.hpp"

namespace portrewrite {

using Id = std::string;
using PnPair = std::pair<Id, Id>;  // (port, node)
using PpPair = std::pair<Id, Id>;  // unordered, stored with first <= second

inline PpPair pp_key(const Id& a, const Id& b) { return a <= b ? PpPair{a, b} : PpPair{b, a}; }

template <class A>
class BasicPregraph {
 public:
  using Attr = A;
  using AttrSet = std::vector<A>;

  // Adding an existing node or port again unions the attribute sets.
  void add_node(const Id& id, AttrSet attrs = {}) { add_element(nodes_, ports_, id, std::move(attrs), "node"); }
  void add_port(const Id& id, AttrSet attrs = {}) { add_element(ports_, nodes_, id, std::move(attrs), "port"); }

  void add_pn(const Id& port, const Id& node) {
    require(ports_, port, "port");
    require(nodes_, node, "node");
    if (pn_.emplace(port, node).second) {
      port_nodes_[port].insert(node);
      node_ports_[node].insert(port);
    }
  }

  void add_pp(const Id& a, const Id& b) {
    require(ports_, a, "port");
    require(ports_, b, "port");
    if (pp_.insert(pp_key(a, b)).second) {
      links_[a].insert(b);
      links_[b].insert(a);
    }
  }

  void add_attr(const Id& element, A value) {
    auto& set = attrs_ref(element);
    set.push_back(std::move(value));
    normalize_set(set);
  }

  void set_attrs(const Id& element, AttrSet attrs) {
    normalize_set(attrs);
    attrs_ref(element) = std::move(attrs);
  }

  bool has_node(const Id& id) const { return nodes_.count(id) > 0; }
  bool has_port(const Id& id) const { return ports_.count(id) > 0; }
  bool has_element(const Id& id) const { return has_node(id) || has_port(id); }
  bool has_pn(const Id& port, const Id& node) const { return pn_.count({port, node}) > 0; }
  bool has_pp(const Id& a, const Id& b) const { return pp_.count(pp_key(a, b)) > 0; }

  const std::map<Id, AttrSet>& nodes() const { return nodes_; }
  const std::map<Id, AttrSet>& ports() const { return ports_; }
  const std::set<PnPair>& pn() const { return pn_; }
  const std::set<PpPair>& pp() const { return pp_; }

  const AttrSet& attrs(const Id& element) const {
    if (auto it = nodes_.find(element); it != nodes_.end()) return it->second;
    if (auto it = ports_.find(element); it != ports_.end()) return it->second;
    throw std::out_of_range("unknown element '" + element + "'");
  }

  // Neighborhoods, sorted by identifier.
  const std::set<Id>& nodes_of(const Id& port) const { return lookup(port_nodes_, port); }
  const std::set<Id>& ports_of(const Id& node) const { return lookup(node_ports_, node); }
  const std::set<Id>& links_of(const Id& port) const { return lookup(links_, port); }

  std::size_t size() const { return nodes_.size() + ports_.size(); }

  friend bool operator==(const BasicPregraph& a, const BasicPregraph& b) {
    return a.nodes_ == b.nodes_ && a.ports_ == b.ports_ && a.pn_ == b.pn_ && a.pp_ == b.pp_;
  }

 private:
  static void add_element(std::map<Id, AttrSet>& into, const std::map<Id, AttrSet>& other,
                          const Id& id, AttrSet attrs, const char* what) {
    if (id.empty()) throw std::invalid_argument(std::string("empty ") + what + " identifier");
    if (other.count(id))
      throw std::invalid_argument("identifier '" + id + "' used for both a node and a port");
    auto& set = into[id];
    set.insert(set.end(), std::make_move_iterator(attrs.begin()), std::make_move_iterator(attrs.end()));
    normalize_set(set);
  }

  static void require(const std::map<Id, AttrSet>& m, const Id& id, const char* what) {
    if (!m.count(id)) throw std::invalid_argument(std::string("unknown ") + what + " '" + id + "'");
  }

  AttrSet& attrs_ref(const Id& element) {
    if (auto it = nodes_.find(element); it != nodes_.end()) return it->second;
    if (auto it = ports_.find(element); it != ports_.end()) return it->second;
    throw std::out_of_range("unknown element '" + element + "'");
  }

  static const std::set<Id>& lookup(const std::map<Id, std::set<Id>>& m, const Id& id) {
    static const std::set<Id> empty;
    auto it = m.find(id);
    return it == m.end() ? empty : it->second;
  }

  std::map<Id, AttrSet> nodes_;
  std::map<Id, AttrSet> ports_;
  std::set<PnPair> pn_;
  std::set<PpPair> pp_;
  std::map<Id, std::set<Id>> port_nodes_;
  std::map<Id, std::set<Id>> node_ports_;
  std::map<Id, std::set<Id>> links_;
};

using Pregraph = BasicPregraph<AttrValue>;
using PatternGraph = BasicPregraph<AttrTerm>;

struct GraphViolation {
  enum class Kind { MultipleNodes, MultipleLinks, SelfLink };
  Id port;
  Kind kind;
  std::vector<Id> offending;  // the nodes or linked ports involved
};

std::string to_string(GraphViolation::Kind k);

template <class A>
std::vector<GraphViolation> graph_violations(const BasicPregraph<A>& g) {
  std::vector<GraphViolation> out;
  for (const auto& [port, attrs] : g.ports()) {
    const auto& nodes = g.nodes_of(port);
    if (nodes.size() > 1)
      out.push_back({port, GraphViolation::Kind::MultipleNodes, {nodes.begin(), nodes.end()}});
    const auto& links = g.links_of(port);
    if (links.count(port)) out.push_back({port, GraphViolation::Kind::SelfLink, {port}});
    if (links.size() > 1)
      out.push_back({port, GraphViolation::Kind::MultipleLinks, {links.begin(), links.end()}});
  }
  return out;
}

template <class A>
struct GraphCheck;

// A pregraph known to be a graph. Only validate_graph creates one.
template <class A>
class BasicGraphWitness {
 public:
  const BasicPregraph<A>& graph() const { return g_; }
  operator const BasicPregraph<A>&() const { return g_; }

  // Convenience for call sites that already know the input is a graph.
  static BasicGraphWitness require(BasicPregraph<A> g) {
    auto v = graph_violations(g);
    if (!v.empty())
      throw std::invalid_argument("not a graph: port '" + v.front().port + "' violates " +
                                  to_string(v.front().kind));
    return BasicGraphWitness(std::move(g));
  }

 private:
  explicit BasicGraphWitness(BasicPregraph<A> g) : g_(std::move(g)) {}
  template <class B>
  friend struct GraphCheck;
  BasicPregraph<A> g_;
};

template <class A>
struct GraphCheck {
  std::optional<BasicGraphWitness<A>> witness;
  std::vector<GraphViolation> violations;
  bool ok() const { return witness.has_value(); }

  static GraphCheck run(BasicPregraph<A> g) {
    GraphCheck out;
    out.violations = graph_violations(g);
    if (out.violations.empty()) out.witness = BasicGraphWitness<A>(std::move(g));
    return out;
  }
};

using GraphWitness = BasicGraphWitness<AttrValue>;

template <class A>
GraphCheck<A> validate_graph(BasicPregraph<A> g) {
  return GraphCheck<A>::run(std::move(g));
}

// Classes sorted internally and by first member.
using Partition = std::vector<std::vector<Id>>;

Partition port_equivalence(const Pregraph& g);
Partition node_equivalence(const Pregraph& g, const Partition& port_classes);

struct QuotientMap {
  std::map<Id, Id> port_class;
  std::map<Id, Id> node_class;
  std::map<Id, std::vector<Id>> port_classes;
  std::map<Id, std::vector<Id>> node_classes;

  // Only the classes with more than one member.
  std::map<Id, std::vector<Id>> merged_ports() const;
  std::map<Id, std::vector<Id>> merged_nodes() const;
};

struct Quotient {
  Pregraph graph;
  QuotientMap map;
};

// Class identifiers are the least member identifier.
Quotient quotient(const Pregraph& g);

bool has_odd_loop(const Pregraph& g);

struct Isomorphism {
  std::map<Id, Id> nodes;
  std::map<Id, Id> ports;
};

// Identifier renaming that preserves pn, pp and attribute sets (numbers up to epsilon).
std::optional<Isomorphism> is_isomorphic(const Pregraph& g1, const Pregraph& g2);
bool pregraphs_equivalent(const Pregraph& g1, const Pregraph& g2);

bool same_attr_set(const std::vector<AttrValue>& a, const std::vector<AttrValue>& b);

}  // namespace portrewrite
