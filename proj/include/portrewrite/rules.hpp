#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "portrewrite/pregraph.hpp"

namespace portrewrite {

enum class Part { Cut, Env, New };

std::string to_string(Part p);
Part parse_part(const std::string& s);

// One side of a rule. Every node, port, pn pair, pp pair and attribute entry
// carries a part label: cut/env on the left, new/env on the right.
struct RuleSide {
  PatternGraph graph;
  std::map<Id, Part> parts;
  std::map<PnPair, Part> pn_parts;
  std::map<PpPair, Part> pp_parts;
  std::map<std::pair<Id, std::string>, Part> attr_parts;  // keyed by rendered term

  // Attribute entries take the element's part unless attr_part is given.
  void add_node(const Id& id, Part part, std::vector<AttrTerm> attrs = {},
                std::optional<Part> attr_part = std::nullopt);
  void add_port(const Id& id, Part part, std::vector<AttrTerm> attrs = {},
                std::optional<Part> attr_part = std::nullopt);
  void add_pn(const Id& port, const Id& node, Part part);
  void add_pp(const Id& a, const Id& b, Part part);
  void add_attr(const Id& element, const AttrTerm& t, Part part);

  Part part(const Id& element) const;
  Part pn_part(const Id& port, const Id& node) const;
  Part pp_part(const Id& a, const Id& b) const;
  Part attr_part(const Id& element, const AttrTerm& t) const;

  std::vector<AttrTerm> attrs_with(const Id& element, Part part) const;
  std::set<std::string> variables() const;
};

struct EsrRule {
  std::string name;
  RuleSide lhs;
  RuleSide rhs;
};

// Gives every rhs env element the env attribute entries of its lhs
// counterpart, so that the entries are shared rather than restated.
void inherit_env_attrs(EsrRule& r);

struct RuleViolation {
  // "1".."6" for the numbered constraints; otherwise one of
  // lhs-graph, rhs-graph, labels, env-subset, fresh, variables, binding.
  std::string constraint;
  std::string message;
};

std::vector<RuleViolation> validate_rule(const EsrRule& r);

struct RuleVariant {
  EsrRule rule;
  std::string tag;
  std::map<Id, Id> renaming;                      // original -> variant, nodes and ports
  std::map<std::string, std::string> var_renaming;

  EsrRule original() const;
};

std::string variant_suffix(const std::string& tag);
EsrRule rename_rule(const EsrRule& r, const std::map<Id, Id>& ids,
                    const std::map<std::string, std::string>& vars);
RuleVariant fresh_variant(const EsrRule& r, const std::string& tag);

class VariantCounter {
 public:
  explicit VariantCounter(std::uint64_t first = 1) : next_(first) {}
  std::string take() { return std::to_string(next_++); }

 private:
  std::uint64_t next_;
};

RuleVariant fresh_variant(const EsrRule& r, VariantCounter& counter);

struct Automorphism {
  std::map<Id, Id> nodes;
  std::map<Id, Id> ports;
  std::map<std::string, std::string> vars;
};

// Compact list of automorphisms over a fixed element ordering (nodes sorted,
// then ports sorted).
class AutomorphismList {
 public:
  AutomorphismList() = default;
  AutomorphismList(std::vector<Id> elements, std::size_t node_count)
      : ids_(std::move(elements)), node_count_(node_count) {}

  std::size_t size() const { return perms_.size(); }
  bool empty() const { return perms_.empty(); }
  Automorphism operator[](std::size_t i) const;
  const std::vector<Id>& elements() const { return ids_; }
  std::size_t node_count() const { return node_count_; }
  const std::vector<int>& perm(std::size_t i) const { return perms_[i]; }
  const std::map<std::string, std::string>& vars(std::size_t i) const { return vars_[i]; }

  void push(std::vector<int> perm, std::map<std::string, std::string> vars) {
    perms_.push_back(std::move(perm));
    vars_.push_back(std::move(vars));
  }

 private:
  std::vector<Id> ids_;
  std::size_t node_count_ = 0;
  std::vector<std::vector<int>> perms_;
  std::vector<std::map<std::string, std::string>> vars_;
};

AutomorphismList enumerate_automorphisms(const GraphWitness& g);
// Label-preserving automorphisms of a rule side; variables may be permuted
// consistently, ground values must match.
AutomorphismList enumerate_automorphisms(const RuleSide& side);

struct SymmetryReport {
  bool holds = false;
  AutomorphismList lhs;
  AutomorphismList rhs_partners;  // partner of lhs[i] when holds
  std::optional<std::size_t> failing;  // index into lhs of an automorphism without partner
};

SymmetryReport check_symmetry_condition(const EsrRule& r);

bool check_parallel_safety(const EsrRule& r);

struct Overlap {
  std::vector<std::pair<Id, Id>> identified;  // (element of first lhs, element of second lhs)
  std::string conflict;
};

struct CompatibilityReport {
  bool compatible = true;
  std::optional<Overlap> counterexample;
};

CompatibilityReport check_compatibility(const EsrRule& r1, const EsrRule& r2);

struct ConflictFreedomReport {
  bool conflict_free = true;
  std::optional<std::pair<std::string, std::string>> failing_pair;
  std::optional<Overlap> overlap;
  std::vector<std::pair<std::string, std::string>> incompatible;  // every failing pair
};

ConflictFreedomReport check_conflict_free(const std::vector<EsrRule>& rules);

class InvalidRule : public std::runtime_error {
 public:
  InvalidRule(const std::string& rule, std::vector<RuleViolation> violations);
  const std::vector<RuleViolation>& violations() const { return violations_; }

 private:
  std::vector<RuleViolation> violations_;
};

namespace detail {
struct CompiledRule;
}

// A validated rule set with cached analyses. The parallel relations consult
// the cached verdicts instead of recomputing them per step.
class RuleSystem {
 public:
  explicit RuleSystem(std::vector<EsrRule> rules);
  ~RuleSystem();
  RuleSystem(RuleSystem&&) noexcept;
  RuleSystem& operator=(RuleSystem&&) noexcept;

  const std::vector<EsrRule>& rules() const { return rules_; }
  const EsrRule& rule(const std::string& name) const;
  const detail::CompiledRule& compiled(const std::string& name) const;

  void verify_symmetry();
  void verify_conflict_freedom();

  const std::optional<SymmetryReport>& symmetry(const std::string& name) const;
  const std::optional<ConflictFreedomReport>& conflict_freedom() const { return conflict_; }
  bool parallel_safe(const std::string& name) const;

 private:
  std::vector<EsrRule> rules_;
  std::vector<std::unique_ptr<detail::CompiledRule>> compiled_;
  std::map<std::string, std::size_t> by_name_;
  std::vector<std::optional<SymmetryReport>> symmetry_;
  std::optional<ConflictFreedomReport> conflict_;
};

}  // namespace portrewrite
