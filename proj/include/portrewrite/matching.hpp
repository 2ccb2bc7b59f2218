#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "portrewrite/rules.hpp"

namespace portrewrite {

// A match of a rule variant into a host graph. The maps are keyed by the
// identifiers of the original rule; the variant is the original renamed with
// the suffix of `tag`.
struct Match {
  std::shared_ptr<const EsrRule> rule;
  std::string tag;
  std::map<Id, Id> nodes;
  std::map<Id, Id> ports;
  Substitution subst;  // over the original variable names

  const std::string& rule_name() const { return rule->name; }
  RuleVariant variant() const { return fresh_variant(*rule, tag); }
  // Maps keyed by the variant's identifiers and variables.
  std::map<Id, Id> variant_nodes() const;
  std::map<Id, Id> variant_ports() const;
  Substitution variant_subst() const;

  const Id& image(const Id& lhs_element) const;
  // Images of the lhs nodes then ports, each group in identifier order.
  std::vector<Id> image_sequence() const;
};

// Deterministic order: rule name, sorted image identifiers, image sequence,
// rendered substitution.
bool match_less(const Match& a, const Match& b);

struct MatchOptions {
  // Require distinct variables to take distinct values.
  bool strict_attrs = false;
};

// One match per distinct homomorphism, in the deterministic order, tagged
// "1", "2", ...
std::vector<Match> enumerate_matches(const EsrRule& r, const GraphWitness& g, MatchOptions options = {});
std::vector<Match> enumerate_matches(std::shared_ptr<const EsrRule> r, const GraphWitness& g,
                                     MatchOptions options = {});

// Empty when m is a homomorphism of its rule's lhs into g; otherwise the reason.
std::optional<std::string> check_match(const Match& m, const Pregraph& g);

bool matches_equivalent(const Match& a, const Match& b);
// Whether a = b composed with some lhs automorphism. `lhs_automorphisms`
// must come from enumerate_automorphisms(rule.lhs).
bool matches_auto_equivalent(const Match& a, const Match& b, const AutomorphismList& lhs_automorphisms);
bool matches_auto_equivalent(const Match& a, const Match& b);

class SymmetryConditionUnchecked : public std::runtime_error {
 public:
  explicit SymmetryConditionUnchecked(const std::string& rule)
      : std::runtime_error("symmetry condition of rule '" + rule + "' has not been checked"), rule_(rule) {}
  const std::string& rule() const { return rule_; }

 private:
  std::string rule_;
};

class SymmetryConditionFailed : public std::runtime_error {
 public:
  explicit SymmetryConditionFailed(const std::string& rule)
      : std::runtime_error("rule '" + rule + "' does not satisfy the symmetry condition"), rule_(rule) {}
  const std::string& rule() const { return rule_; }

 private:
  std::string rule_;
};

struct AutoMatchOptions {
  MatchOptions match;
  // When set, each class is represented by a pseudo-randomly chosen member
  // instead of the least one. Enumerates every match, so meant for small hosts.
  std::optional<std::uint64_t> representative_seed;
};

// One match per class of matches equal up to an lhs automorphism, for every
// rule of rs, in the deterministic order.
std::vector<Match> auto_match_set(const RuleSystem& rs, const GraphWitness& g, AutoMatchOptions options = {});
// The same for a single rule of rs.
std::vector<Match> auto_match_set(const RuleSystem& rs, const std::string& rule, const GraphWitness& g,
                                  AutoMatchOptions options = {});

// All matches of r grouped by equality up to lhs automorphisms. Each class is
// sorted and classes are ordered by their least member.
std::vector<std::vector<Match>> auto_match_classes(const EsrRule& r, const GraphWitness& g,
                                                   MatchOptions options = {});

struct WellBehavedReport {
  bool well_behaved = true;
  std::vector<Id> offending;  // host ports that would gain a second link or node
};

WellBehavedReport is_well_behaved(const Match& m, const GraphWitness& g);

}  // namespace portrewrite
