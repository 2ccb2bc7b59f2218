#pragma once

// Index-based views of rule sides and host graphs, and the labeled
// isomorphism search shared by automorphism enumeration and the symmetry check.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "portrewrite/rules.hpp"

namespace portrewrite::detail {

struct Entry {
  AttrTerm term;  // in canonical form
  Part part;
};

struct SideIndex {
  std::vector<Id> ids;  // nodes sorted, then ports sorted
  std::size_t node_count = 0;
  std::unordered_map<Id, int> index;
  std::vector<Part> part;
  std::vector<int> port_node;  // -1 when absent; only meaningful for ports
  std::vector<Part> pn_part;
  std::vector<int> port_link;
  std::vector<Part> pp_part;
  std::vector<std::vector<int>> node_ports;
  std::vector<std::vector<Entry>> attrs;

  static SideIndex of(const RuleSide& side);
  static SideIndex of(const Pregraph& g);

  std::size_t size() const { return ids.size(); }
  bool is_port(int v) const { return static_cast<std::size_t>(v) >= node_count; }
  int at(const Id& id) const { return index.at(id); }
};

class VarBijection {
 public:
  bool bind(const std::string& a, const std::string& b);
  std::size_t mark() const { return trail_.size(); }
  void undo(std::size_t mark);
  const std::map<std::string, std::string>& forward() const { return fwd_; }
  void lock() { locked_ = true; }

 private:
  std::map<std::string, std::string> fwd_, bwd_;
  std::vector<std::string> trail_;
  bool locked_ = false;
};

struct IsoOptions {
  std::vector<int> fixed;  // per vertex of a: required image or -1
  std::map<std::string, std::string> var_preset;
  bool vars_locked = false;
};

// Calls on_found for every label-preserving isomorphism a -> b until it
// returns true. Returns whether the search was stopped.
bool search_isomorphisms(
    const SideIndex& a, const SideIndex& b, const IsoOptions& options,
    const std::function<bool(const std::vector<int>&, const std::map<std::string, std::string>&)>& on_found);

// Pairs (a, b) meaning that a lex-least match sends lhs vertex a below vertex b,
// compared by host identifier order.
struct LexLeader {
  std::vector<std::pair<int, int>> less;
  std::vector<std::map<std::string, std::string>> kernel;  // variable-only automorphisms
};

LexLeader lex_leader(const AutomorphismList& auts, std::size_t vertex_count);

struct CompiledRule {
  std::shared_ptr<const EsrRule> rule;
  SideIndex lhs;
  SideIndex rhs;
  bool parallel_safe = false;
  bool no_new_elements = false;
  // Present once the symmetry condition has been checked.
  std::optional<LexLeader> lex;
};

CompiledRule compile(const EsrRule& r);

}  // namespace portrewrite::detail
