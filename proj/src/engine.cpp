#include "portrewrite/engine.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "pattern.hpp"

namespace portrewrite {

namespace {

// Accumulates the pieces of H contributed by a list of matches. Cut images are
// collected as sets, so an element cut by several matches is removed once.
class Builder {
 public:
  explicit Builder(const Pregraph& g) : g_(g) {}

  void add(const Match& m) {
    const auto& L = m.rule->lhs;
    const auto& R = m.rule->rhs;
    const auto& s = m.subst;
    for (const auto& [n, a] : L.graph.nodes())
      if (L.part(n) == Part::Cut) cut_nodes_.insert(m.image(n));
    for (const auto& [p, a] : L.graph.ports())
      if (L.part(p) == Part::Cut) cut_ports_.insert(m.image(p));
    for (const auto& [p, n] : L.graph.pn())
      if (L.pn_part(p, n) == Part::Cut) cut_pn_.insert({m.image(p), m.image(n)});
    for (const auto& [a, b] : L.graph.pp())
      if (L.pp_part(a, b) == Part::Cut) cut_pp_.insert(pp_key(m.image(a), m.image(b)));
    auto cut_attrs = [&](const Id& x) {
      if (L.part(x) == Part::Cut) return;
      for (const auto& t : L.attrs_with(x, Part::Cut)) cut_values_[m.image(x)].push_back(evaluate(t, s));
    };
    for (const auto& [n, a] : L.graph.nodes()) cut_attrs(n);
    for (const auto& [p, a] : L.graph.ports()) cut_attrs(p);

    const std::string suffix = variant_suffix(m.tag);
    auto target = [&](const Id& x) { return R.part(x) == Part::New ? x + suffix : m.image(x); };
    auto add_element = [&](const Id& x, std::map<Id, std::vector<AttrValue>>& fresh) {
      if (R.part(x) == Part::New) {
        Id id = x + suffix;
        if (g_.has_element(id) || new_nodes_.count(id) || new_ports_.count(id))
          throw std::invalid_argument("variant identifier '" + id + "' is already in use");
        auto& attrs = fresh[id];
        for (const auto& t : R.graph.attrs(x)) attrs.push_back(evaluate(t, s));
        return;
      }
      for (const auto& t : R.attrs_with(x, Part::New)) added_values_[m.image(x)].push_back(evaluate(t, s));
    };
    for (const auto& [n, a] : R.graph.nodes()) add_element(n, new_nodes_);
    for (const auto& [p, a] : R.graph.ports()) add_element(p, new_ports_);
    for (const auto& [p, n] : R.graph.pn())
      if (R.pn_part(p, n) == Part::New) new_pn_.insert({target(p), target(n)});
    for (const auto& [a, b] : R.graph.pp())
      if (R.pp_part(a, b) == Part::New) new_pp_.insert(pp_key(target(a), target(b)));
  }

  Pregraph build(std::size_t& dangling) const {
    Pregraph h;
    for (const auto& [n, a] : g_.nodes())
      if (!cut_nodes_.count(n)) h.add_node(n, adjusted(n, a));
    for (const auto& [p, a] : g_.ports())
      if (!cut_ports_.count(p)) h.add_port(p, adjusted(p, a));
    for (const auto& [n, a] : new_nodes_) h.add_node(n, a);
    for (const auto& [p, a] : new_ports_) h.add_port(p, a);
    auto link_pn = [&](const Id& p, const Id& n) {
      if (h.has_port(p) && h.has_node(n))
        h.add_pn(p, n);
      else
        ++dangling;
    };
    auto link_pp = [&](const Id& a, const Id& b) {
      if (h.has_port(a) && h.has_port(b))
        h.add_pp(a, b);
      else
        ++dangling;
    };
    for (const auto& [p, n] : g_.pn())
      if (!cut_pn_.count({p, n})) link_pn(p, n);
    for (const auto& [a, b] : g_.pp())
      if (!cut_pp_.count({a, b})) link_pp(a, b);
    for (const auto& [p, n] : new_pn_) link_pn(p, n);
    for (const auto& [a, b] : new_pp_) link_pp(a, b);
    return h;
  }

 private:
  std::vector<AttrValue> adjusted(const Id& x, const std::vector<AttrValue>& attrs) const {
    std::vector<AttrValue> out;
    auto cut = cut_values_.find(x);
    for (const auto& v : attrs)
      if (cut == cut_values_.end() || !contains_approx(cut->second, v)) out.push_back(v);
    if (auto add = added_values_.find(x); add != added_values_.end())
      out.insert(out.end(), add->second.begin(), add->second.end());
    normalize_set(out);
    return out;
  }

  const Pregraph& g_;
  std::set<Id> cut_nodes_, cut_ports_;
  std::set<PnPair> cut_pn_, new_pn_;
  std::set<PpPair> cut_pp_, new_pp_;
  std::map<Id, std::vector<AttrValue>> cut_values_, added_values_;
  std::map<Id, std::vector<AttrValue>> new_nodes_, new_ports_;
};

QuotientMap identity_map(const Pregraph& g) {
  QuotientMap q;
  for (const auto& [n, a] : g.nodes()) {
    q.node_class[n] = n;
    q.node_classes[n] = {n};
  }
  for (const auto& [p, a] : g.ports()) {
    q.port_class[p] = p;
    q.port_classes[p] = {p};
  }
  return q;
}

void require_fresh(const Match& m, const Pregraph& g) {
  if (auto reason = check_match(m, g)) throw MatchStale(m.tag, *reason);
}

}  // namespace

StepResult sequential_step(const GraphWitness& g, const Match& m) {
  require_fresh(m, g);
  Builder b(g);
  b.add(m);
  StepResult out;
  out.intermediate = b.build(out.dangling_dropped);
  out.result = out.intermediate;
  out.quotient_map = identity_map(out.result);
  out.violations = graph_violations(out.result);
  out.is_graph = out.violations.empty();
  out.matches_used = {m};
  return out;
}

StepResult parallel_step(const RuleSystem& rs, const GraphWitness& g, std::vector<Match> ms, StepOptions options) {
  if (!options.allow_unverified) {
    const auto& cf = rs.conflict_freedom();
    if (!cf) throw ConflictFreedomUnverified();
    if (!cf->conflict_free) throw RulesNotConflictFree(cf->failing_pair->first, cf->failing_pair->second);
  }
  std::set<std::string> tags;
  Builder b(g);
  for (const auto& m : ms) {
    rs.compiled(m.rule_name());
    if (!tags.insert(m.tag).second) throw std::invalid_argument("variant tag '" + m.tag + "' used twice");
    require_fresh(m, g);
    b.add(m);
  }
  StepResult out;
  out.intermediate = b.build(out.dangling_dropped);
  auto q = quotient(out.intermediate);
  out.result = std::move(q.graph);
  out.quotient_map = std::move(q.map);
  out.violations = graph_violations(out.result);
  out.is_graph = out.violations.empty();
  out.matches_used = std::move(ms);
  return out;
}

std::uint64_t next_step_index(const Pregraph& g) {
  std::uint64_t top = 0;
  auto scan = [&](const Id& id) {
    for (std::size_t i = id.find('#'); i != Id::npos; i = id.find('#', i + 1)) {
      std::size_t j = i + 1;
      while (j < id.size() && std::isdigit(static_cast<unsigned char>(id[j]))) ++j;
      if (j > i + 1 && j < id.size() && id[j] == '.' && j - i - 1 < 19)
        top = std::max<std::uint64_t>(top, std::stoull(id.substr(i + 1, j - i - 1)));
    }
  };
  for (const auto& [n, a] : g.nodes()) scan(n);
  for (const auto& [p, a] : g.ports()) scan(p);
  return top + 1;
}

void assign_tags(std::vector<Match>& ms, std::uint64_t step) {
  for (std::size_t i = 0; i < ms.size(); ++i) ms[i].tag = std::to_string(step) + "." + std::to_string(i + 1);
}

StepResult full_parallel_step(const RuleSystem& rs, const GraphWitness& g, FullStepOptions options) {
  std::vector<Match> ms;
  std::vector<std::string> collapsed;
  for (const auto& r : rs.rules()) {
    const auto& sym = rs.symmetry(r.name);
    const auto& c = rs.compiled(r.name);
    std::vector<Match> part;
    if (options.collapse && sym && sym->holds && c.no_new_elements) {
      AutoMatchOptions ao;
      ao.match = options.match;
      part = auto_match_set(rs, r.name, g, ao);
      collapsed.push_back(r.name);
    } else {
      part = enumerate_matches(c.rule, g, options.match);
    }
    for (auto& m : part) ms.push_back(std::move(m));
  }
  assign_tags(ms, options.step_index.value_or(next_step_index(g)));
  auto out = parallel_step(rs, g, std::move(ms), options.step);
  out.collapsed_rules = std::move(collapsed);
  return out;
}

StepResult auto_parallel_step(const RuleSystem& rs, const GraphWitness& g, AutoStepOptions options) {
  auto ms = auto_match_set(rs, g, options.match);
  assign_tags(ms, options.step_index.value_or(next_step_index(g)));
  return parallel_step(rs, g, std::move(ms), options.step);
}

std::string to_string(Mode m) { return m == Mode::Full ? "full" : "auto"; }

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::Budget: return "budget";
    case StopReason::Fixpoint: return "fixpoint";
    case StopReason::NonGraph: return "non-graph";
  }
  return "budget";
}

RunReport run(const RuleSystem& rs, const GraphWitness& g, RunOptions options) {
  RunReport report;
  report.initial = g.graph();
  std::optional<GraphWitness> current = g;
  for (std::size_t k = 0; k < options.max_steps; ++k) {
    auto start = std::chrono::steady_clock::now();
    StepResult step;
    if (options.mode == Mode::Full) {
      FullStepOptions o;
      o.step = options.step;
      o.match = options.match;
      o.collapse = options.collapse;
      step = full_parallel_step(rs, *current, o);
    } else {
      AutoStepOptions o;
      o.step = options.step;
      o.match.match = options.match;
      step = auto_parallel_step(rs, *current, o);
    }
    report.timings.push_back(std::chrono::steady_clock::now() - start);
    bool fixpoint = options.stop_on_fixpoint && pregraphs_equivalent(current->graph(), step.result);
    report.steps.push_back(std::move(step));
    const auto& last = report.steps.back();
    if (!last.is_graph) {
      report.stop = StopReason::NonGraph;
      return report;
    }
    if (fixpoint) {
      report.stop = StopReason::Fixpoint;
      report.fixpoint_step = report.steps.size() - 1;
      return report;
    }
    current = GraphWitness::require(last.result);
  }
  report.stop = StopReason::Budget;
  return report;
}

}  // namespace portrewrite
