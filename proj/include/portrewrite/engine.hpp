#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "portrewrite/matching.hpp"

namespace portrewrite {

struct StepResult {
  // H before quotienting: the host minus every cut image, plus every new element.
  Pregraph intermediate;
  Pregraph result;
  QuotientMap quotient_map;
  bool is_graph = false;
  std::vector<GraphViolation> violations;  // empty when is_graph
  std::vector<Match> matches_used;
  // Host pn/pp pairs whose node or port was cut while the pair itself was not.
  std::size_t dangling_dropped = 0;
  // Rules whose matches were reduced to one per automorphism class in a full step.
  std::vector<std::string> collapsed_rules;
};

class ConflictFreedomUnverified : public std::runtime_error {
 public:
  ConflictFreedomUnverified()
      : std::runtime_error("conflict freedom of the rule set has not been verified") {}
};

class RulesNotConflictFree : public std::runtime_error {
 public:
  RulesNotConflictFree(const std::string& a, const std::string& b)
      : std::runtime_error("rules '" + a + "' and '" + b + "' are not compatible") {}
};

class MatchStale : public std::runtime_error {
 public:
  MatchStale(const std::string& tag, const std::string& reason)
      : std::runtime_error("match " + tag + " no longer applies: " + reason) {}
};

struct StepOptions {
  // Run a parallel step even if conflict freedom is unverified or fails.
  bool allow_unverified = false;
};

// Rewrites with one match without quotienting. New elements are named by the
// match's variant tag.
StepResult sequential_step(const GraphWitness& g, const Match& m);

// Tags must be pairwise distinct; every rule must belong to rs.
StepResult parallel_step(const RuleSystem& rs, const GraphWitness& g, std::vector<Match> ms,
                         StepOptions options = {});

struct FullStepOptions {
  StepOptions step;
  MatchOptions match;
  // For rules that add no nodes or ports and whose symmetry condition holds,
  // automorphic matches contribute identical pieces of H, so one per class suffices.
  bool collapse = true;
  // Leading component of the variant tags; derived from the host when unset.
  std::optional<std::uint64_t> step_index;
};

StepResult full_parallel_step(const RuleSystem& rs, const GraphWitness& g, FullStepOptions options = {});

struct AutoStepOptions {
  StepOptions step;
  AutoMatchOptions match;
  std::optional<std::uint64_t> step_index;
};

StepResult auto_parallel_step(const RuleSystem& rs, const GraphWitness& g, AutoStepOptions options = {});

// One more than the largest k in identifiers of the form "...#k.j".
std::uint64_t next_step_index(const Pregraph& g);
// Sets each tag to "step.i" with i counting from 1 in list order.
void assign_tags(std::vector<Match>& ms, std::uint64_t step);

enum class Mode { Full, Auto };
enum class StopReason { Budget, Fixpoint, NonGraph };

std::string to_string(Mode m);
std::string to_string(StopReason r);

struct RunOptions {
  Mode mode = Mode::Auto;
  std::size_t max_steps = 1;
  bool stop_on_fixpoint = true;
  bool collapse = true;
  MatchOptions match;
  StepOptions step;
};

struct RunReport {
  Pregraph initial;
  std::vector<StepResult> steps;
  std::vector<std::chrono::duration<double>> timings;
  StopReason stop = StopReason::Budget;
  // Index into steps of the result equivalent to its input.
  std::optional<std::size_t> fixpoint_step;

  const Pregraph& final_graph() const { return steps.empty() ? initial : steps.back().result; }
};

RunReport run(const RuleSystem& rs, const GraphWitness& g, RunOptions options = {});

}  // namespace portrewrite
