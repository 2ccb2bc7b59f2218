#include "portrewrite/rules.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "pattern.hpp"

namespace portrewrite {

std::string to_string(Part p) {
  switch (p) {
    case Part::Cut:
      return "cut";
    case Part::Env:
      return "env";
    case Part::New:
      return "new";
  }
  return "?";
}

Part parse_part(const std::string& s) {
  if (s == "cut") return Part::Cut;
  if (s == "env") return Part::Env;
  if (s == "new") return Part::New;
  throw std::invalid_argument("unknown part '" + s + "'");
}

void RuleSide::add_node(const Id& id, Part part, std::vector<AttrTerm> attrs, std::optional<Part> attr_part) {
  graph.add_node(id);
  parts[id] = part;
  for (auto& t : attrs) add_attr(id, t, attr_part.value_or(part));
}

void RuleSide::add_port(const Id& id, Part part, std::vector<AttrTerm> attrs, std::optional<Part> attr_part) {
  graph.add_port(id);
  parts[id] = part;
  for (auto& t : attrs) add_attr(id, t, attr_part.value_or(part));
}

void RuleSide::add_pn(const Id& port, const Id& node, Part part) {
  graph.add_pn(port, node);
  pn_parts[{port, node}] = part;
}

void RuleSide::add_pp(const Id& a, const Id& b, Part part) {
  graph.add_pp(a, b);
  pp_parts[pp_key(a, b)] = part;
}

void RuleSide::add_attr(const Id& element, const AttrTerm& t, Part part) {
  graph.add_attr(element, t);
  attr_parts[{element, render(t)}] = part;
}

Part RuleSide::part(const Id& element) const {
  auto it = parts.find(element);
  if (it == parts.end()) throw std::out_of_range("no part label for '" + element + "'");
  return it->second;
}

Part RuleSide::pn_part(const Id& port, const Id& node) const {
  auto it = pn_parts.find({port, node});
  if (it == pn_parts.end()) throw std::out_of_range("no part label for pn (" + port + "," + node + ")");
  return it->second;
}

Part RuleSide::pp_part(const Id& a, const Id& b) const {
  auto it = pp_parts.find(pp_key(a, b));
  if (it == pp_parts.end()) throw std::out_of_range("no part label for pp (" + a + "," + b + ")");
  return it->second;
}

Part RuleSide::attr_part(const Id& element, const AttrTerm& t) const {
  auto it = attr_parts.find({element, render(t)});
  return it == attr_parts.end() ? part(element) : it->second;
}

std::vector<AttrTerm> RuleSide::attrs_with(const Id& element, Part p) const {
  std::vector<AttrTerm> out;
  for (const auto& t : graph.attrs(element))
    if (attr_part(element, t) == p) out.push_back(t);
  return out;
}

std::set<std::string> RuleSide::variables() const {
  std::set<std::string> out;
  for (const auto* m : {&graph.nodes(), &graph.ports()})
    for (const auto& [id, attrs] : *m)
      for (const auto& t : attrs) t.collect_vars(out);
  return out;
}

void inherit_env_attrs(EsrRule& r) {
  for (const auto& [id, part] : r.rhs.parts) {
    if (part != Part::Env || !r.lhs.graph.has_element(id) || !r.lhs.parts.count(id)) continue;
    for (const auto& t : r.lhs.attrs_with(id, Part::Env)) r.rhs.add_attr(id, t, Part::Env);
  }
}

namespace {

bool contains_term(const std::vector<AttrTerm>& set, const AttrTerm& t) {
  for (const auto& x : set)
    if (approx_equal(x, t)) return true;
  return false;
}

bool same_terms(const std::vector<AttrTerm>& a, const std::vector<AttrTerm>& b) {
  if (a.size() != b.size()) return false;
  for (const auto& t : a)
    if (!contains_term(b, t)) return false;
  return true;
}

void collect_bare(const AttrTerm& t, std::set<std::string>& out) {
  if (t.is_var()) out.insert(t.name());
}

}  // namespace

std::vector<RuleViolation> validate_rule(const EsrRule& r) {
  std::vector<RuleViolation> out;
  auto add = [&](std::string c, std::string msg) { out.push_back({std::move(c), std::move(msg)}); };
  const auto& L = r.lhs;
  const auto& R = r.rhs;

  for (const auto& v : graph_violations(L.graph))
    add("lhs-graph", "port '" + v.port + "' has " + to_string(v.kind));
  for (const auto& v : graph_violations(R.graph))
    add("rhs-graph", "port '" + v.port + "' has " + to_string(v.kind));

  // Every component needs a label from the side's alphabet.
  bool labeled = true;
  auto check_label = [&](bool left, const std::string& what, std::optional<Part> p) {
    if (!p) {
      add("labels", what + " has no part label");
      labeled = false;
    } else if ((left && *p == Part::New) || (!left && *p == Part::Cut)) {
      add("labels", what + " is labeled " + to_string(*p) + " on the " + (left ? "left" : "right"));
    }
  };
  for (const RuleSide* side : {&L, &R}) {
    bool left = side == &L;
    for (const auto* m : {&side->graph.nodes(), &side->graph.ports()})
      for (const auto& [id, attrs] : *m) {
        auto it = side->parts.find(id);
        check_label(left, "'" + id + "'", it == side->parts.end() ? std::nullopt : std::optional(it->second));
        if (it == side->parts.end()) continue;
        for (const auto& t : attrs)
          check_label(left, "attribute " + render(t) + " of '" + id + "'", side->attr_part(id, t));
      }
    for (const auto& pn : side->graph.pn()) {
      auto it = side->pn_parts.find(pn);
      check_label(left, "pn (" + pn.first + "," + pn.second + ")",
                  it == side->pn_parts.end() ? std::nullopt : std::optional(it->second));
    }
    for (const auto& pp : side->graph.pp()) {
      auto it = side->pp_parts.find(pp);
      check_label(left, "pp (" + pp.first + "," + pp.second + ")",
                  it == side->pp_parts.end() ? std::nullopt : std::optional(it->second));
    }
  }
  if (!labeled) return out;

  for (const auto& [p, n] : L.graph.pn())
    if ((L.part(p) == Part::Cut || L.part(n) == Part::Cut) && L.pn_part(p, n) != Part::Cut)
      add("1", "pn (" + p + "," + n + ") touches a cut element but is not cut");
  for (const auto& [p, q] : L.graph.pp())
    if ((L.part(p) == Part::Cut || L.part(q) == Part::Cut) && L.pp_part(p, q) != Part::Cut)
      add("2", "pp (" + p + "," + q + ") touches a cut port but is not cut");
  for (const auto& [id, part] : L.parts)
    if (part == Part::Cut)
      for (const auto& t : L.graph.attrs(id))
        if (L.attr_part(id, t) != Part::Cut)
          add("3", "attribute " + render(t) + " of cut element '" + id + "' is not cut");

  for (const auto& [id, part] : R.parts) {
    bool is_node = R.graph.has_node(id);
    if (part == Part::Env) {
      bool ok = L.parts.count(id) && L.part(id) == Part::Env &&
                (is_node ? L.graph.has_node(id) : L.graph.has_port(id));
      if (!ok) add("env-subset", "rhs env element '" + id + "' is not an lhs env element of the same kind");
    } else if (L.graph.has_element(id)) {
      add("fresh", "new rhs element '" + id + "' reuses an lhs identifier");
    }
  }

  auto env_r = [&](const Id& id) { return R.part(id) == Part::Env; };
  for (const auto& [p, n] : R.graph.pn()) {
    bool expected_env = env_r(p) && env_r(n) && L.graph.has_pn(p, n) && L.pn_part(p, n) == Part::Env;
    if ((R.pn_part(p, n) == Part::Env) != expected_env)
      add("4", "rhs pn (" + p + "," + n + ") should be " + (expected_env ? "env" : "new"));
  }
  for (const auto& [p, q] : R.graph.pp()) {
    bool expected_env = env_r(p) && env_r(q) && L.graph.has_pp(p, q) && L.pp_part(p, q) == Part::Env;
    if ((R.pp_part(p, q) == Part::Env) != expected_env)
      add("5", "rhs pp (" + p + "," + q + ") should be " + (expected_env ? "env" : "new"));
  }
  for (const auto& [id, part] : R.parts) {
    auto env_entries = R.attrs_with(id, Part::Env);
    auto new_entries = R.attrs_with(id, Part::New);
    if (part == Part::New) {
      if (!env_entries.empty()) add("6", "new element '" + id + "' has env attributes");
      continue;
    }
    if (!L.graph.has_element(id)) continue;
    if (!same_terms(env_entries, L.attrs_with(id, Part::Env)))
      add("6", "env attributes of '" + id + "' differ between the two sides");
    if (!new_entries.empty() && L.attrs_with(id, Part::Cut).empty())
      add("6", "'" + id + "' gains attributes without cutting any");
  }

  auto lvars = L.variables();
  for (const auto& v : R.variables())
    if (!lvars.count(v)) add("variables", "rhs variable '" + v + "' does not occur on the left");

  std::set<std::string> bare, all;
  for (const auto* m : {&L.graph.nodes(), &L.graph.ports()})
    for (const auto& [id, attrs] : *m)
      for (const auto& t : attrs) {
        collect_bare(t, bare);
        t.collect_vars(all);
      }
  for (const auto& v : all)
    if (!bare.count(v)) add("binding", "lhs variable '" + v + "' only occurs inside compound terms");
  return out;
}

std::string variant_suffix(const std::string& tag) { return "#" + tag; }

namespace {

RuleSide rename_side(const RuleSide& s, const std::map<Id, Id>& ids,
                     const std::map<std::string, std::string>& vars) {
  auto id = [&](const Id& x) {
    auto it = ids.find(x);
    return it == ids.end() ? x : it->second;
  };
  RuleSide out;
  for (const auto& [n, attrs] : s.graph.nodes()) {
    out.add_node(id(n), s.part(n));
    for (const auto& t : attrs) out.add_attr(id(n), rename_vars(t, vars), s.attr_part(n, t));
  }
  for (const auto& [p, attrs] : s.graph.ports()) {
    out.add_port(id(p), s.part(p));
    for (const auto& t : attrs) out.add_attr(id(p), rename_vars(t, vars), s.attr_part(p, t));
  }
  for (const auto& [p, n] : s.graph.pn()) out.add_pn(id(p), id(n), s.pn_part(p, n));
  for (const auto& [a, b] : s.graph.pp()) out.add_pp(id(a), id(b), s.pp_part(a, b));
  return out;
}

}  // namespace

EsrRule rename_rule(const EsrRule& r, const std::map<Id, Id>& ids, const std::map<std::string, std::string>& vars) {
  return EsrRule{r.name, rename_side(r.lhs, ids, vars), rename_side(r.rhs, ids, vars)};
}

RuleVariant fresh_variant(const EsrRule& r, const std::string& tag) {
  RuleVariant v;
  v.tag = tag;
  std::string suffix = variant_suffix(tag);
  for (const RuleSide* s : {&r.lhs, &r.rhs}) {
    for (const auto& [n, a] : s->graph.nodes()) v.renaming[n] = n + suffix;
    for (const auto& [p, a] : s->graph.ports()) v.renaming[p] = p + suffix;
    for (const auto& x : s->variables()) v.var_renaming[x] = x + suffix;
  }
  v.rule = rename_rule(r, v.renaming, v.var_renaming);
  return v;
}

RuleVariant fresh_variant(const EsrRule& r, VariantCounter& counter) { return fresh_variant(r, counter.take()); }

EsrRule RuleVariant::original() const {
  std::map<Id, Id> ids;
  for (const auto& [a, b] : renaming) ids[b] = a;
  std::map<std::string, std::string> vars;
  for (const auto& [a, b] : var_renaming) vars[b] = a;
  return rename_rule(rule, ids, vars);
}

Automorphism AutomorphismList::operator[](std::size_t i) const {
  Automorphism a;
  const auto& p = perms_[i];
  for (std::size_t v = 0; v < ids_.size(); ++v) {
    if (v < node_count_)
      a.nodes[ids_[v]] = ids_[p[v]];
    else
      a.ports[ids_[v]] = ids_[p[v]];
  }
  a.vars = vars_[i];
  return a;
}

namespace {

AutomorphismList all_automorphisms(const detail::SideIndex& s) {
  AutomorphismList out(s.ids, s.node_count);
  detail::search_isomorphisms(s, s, {}, [&](const std::vector<int>& f, const std::map<std::string, std::string>& v) {
    out.push(f, v);
    return false;
  });
  return out;
}

}  // namespace

AutomorphismList enumerate_automorphisms(const GraphWitness& g) {
  return all_automorphisms(detail::SideIndex::of(g.graph()));
}

AutomorphismList enumerate_automorphisms(const RuleSide& side) {
  return all_automorphisms(detail::SideIndex::of(side));
}

SymmetryReport check_symmetry_condition(const EsrRule& r) {
  auto lhs = detail::SideIndex::of(r.lhs);
  auto rhs = detail::SideIndex::of(r.rhs);
  SymmetryReport report;
  report.lhs = all_automorphisms(lhs);
  report.rhs_partners = AutomorphismList(rhs.ids, rhs.node_count);
  auto rvars = r.rhs.variables();
  for (std::size_t i = 0; i < report.lhs.size(); ++i) {
    const auto& h = report.lhs.perm(i);
    detail::IsoOptions opt;
    opt.fixed.assign(rhs.size(), -1);
    bool possible = true;
    for (std::size_t x = 0; x < rhs.size(); ++x) {
      if (rhs.part[x] != Part::Env) continue;
      const Id& image = lhs.ids[h[lhs.at(rhs.ids[x])]];
      auto it = rhs.index.find(image);
      if (it == rhs.index.end()) {
        possible = false;
        break;
      }
      opt.fixed[x] = it->second;
    }
    for (const auto& [a, b] : report.lhs.vars(i))
      if (rvars.count(a)) opt.var_preset[a] = b;
    opt.vars_locked = true;
    bool found = false;
    if (possible) {
      detail::search_isomorphisms(rhs, rhs, opt,
                                  [&](const std::vector<int>& f, const std::map<std::string, std::string>& v) {
                                    report.rhs_partners.push(f, v);
                                    found = true;
                                    return true;
                                  });
    }
    if (!found) {
      report.failing = i;
      report.holds = false;
      report.rhs_partners = AutomorphismList(rhs.ids, rhs.node_count);
      return report;
    }
  }
  report.holds = true;
  return report;
}

bool check_parallel_safety(const EsrRule& r) {
  for (const auto& [a, b] : r.rhs.graph.pp()) {
    if (r.rhs.pp_part(a, b) != Part::New) continue;
    if (r.rhs.part(a) == Part::Env && r.rhs.part(b) == Part::Env) return false;
  }
  return true;
}

namespace {

// Overlap of two left-hand sides: a partial injective identification closed
// under the links a graph forces (identified ports share their node and
// their linked port).
class OverlapClosure {
 public:
  OverlapClosure(const detail::SideIndex& a, const detail::SideIndex& b)
      : a_(a), b_(b), fwd_(a.size(), -1), bwd_(b.size(), -1) {}

  bool identify(int x, int y) {
    std::deque<std::pair<int, int>> work{{x, y}};
    while (!work.empty()) {
      auto [u, w] = work.front();
      work.pop_front();
      if (a_.is_port(u) != b_.is_port(w)) return false;
      if (fwd_[u] == w) continue;
      if (fwd_[u] >= 0 || bwd_[w] >= 0) return false;
      fwd_[u] = w;
      bwd_[w] = u;
      pairs_.emplace_back(u, w);
      if (a_.is_port(u)) {
        if (a_.port_node[u] >= 0 && b_.port_node[w] >= 0) work.emplace_back(a_.port_node[u], b_.port_node[w]);
        if (a_.port_link[u] >= 0 && b_.port_link[w] >= 0) work.emplace_back(a_.port_link[u], b_.port_link[w]);
      }
    }
    return true;
  }

  std::vector<std::pair<Id, Id>> identified(bool swapped) const {
    std::vector<std::pair<Id, Id>> out;
    for (auto [u, w] : pairs_)
      out.push_back(swapped ? std::pair{b_.ids[w], a_.ids[u]} : std::pair{a_.ids[u], b_.ids[w]});
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  const detail::SideIndex& a_;
  const detail::SideIndex& b_;
  std::vector<int> fwd_, bwd_;
  std::vector<std::pair<int, int>> pairs_;
};

bool may_equal(const AttrTerm& x, const AttrTerm& y) {
  if (x.is_ground() && y.is_ground()) {
    try {
      return approx_equal(evaluate(x, {}), evaluate(y, {}));
    } catch (const EvalError&) {
      return false;
    }
  }
  return true;
}

// Looks for an overlap where something ra keeps in its rhs environment is
// cut by rb.
std::optional<Overlap> find_conflict(const EsrRule& ra, const EsrRule& rb, bool swapped) {
  auto la = detail::SideIndex::of(ra.lhs);
  auto lb = detail::SideIndex::of(rb.lhs);
  const RuleSide& Ra = ra.rhs;
  const RuleSide& Lb = rb.lhs;
  auto attempt = [&](const std::vector<std::pair<Id, Id>>& seeds, const std::string& what) -> std::optional<Overlap> {
    OverlapClosure c(la, lb);
    for (const auto& [x, y] : seeds)
      if (!c.identify(la.at(x), lb.at(y))) return std::nullopt;
    return Overlap{c.identified(swapped), what + " is kept by " + ra.name + " and cut by " + rb.name};
  };

  for (const auto& [x, part] : Ra.parts) {
    if (part != Part::Env) continue;
    for (const auto& [y, ypart] : Lb.parts) {
      if (ypart != Part::Cut || Ra.graph.has_node(x) != Lb.graph.has_node(y)) continue;
      if (auto o = attempt({{x, y}}, "element " + x + "~" + y)) return o;
    }
  }
  for (const auto& [p, n] : Ra.graph.pn()) {
    if (Ra.pn_part(p, n) != Part::Env) continue;
    for (const auto& [q, m] : Lb.graph.pn())
      if (Lb.pn_part(q, m) == Part::Cut)
        if (auto o = attempt({{p, q}, {n, m}}, "pn (" + p + "," + n + ")~(" + q + "," + m + ")")) return o;
  }
  for (const auto& [p, p2] : Ra.graph.pp()) {
    if (Ra.pp_part(p, p2) != Part::Env) continue;
    for (const auto& [q, q2] : Lb.graph.pp()) {
      if (Lb.pp_part(q, q2) != Part::Cut) continue;
      std::string what = "pp (" + p + "," + p2 + ")~(" + q + "," + q2 + ")";
      if (auto o = attempt({{p, q}, {p2, q2}}, what)) return o;
      if (auto o = attempt({{p, q2}, {p2, q}}, what)) return o;
    }
  }
  for (const auto* m : {&Ra.graph.nodes(), &Ra.graph.ports()})
    for (const auto& [x, attrs] : *m) {
      if (Ra.part(x) != Part::Env) continue;
      for (const auto& t : Ra.attrs_with(x, Part::Env))
        for (const auto* mb : {&Lb.graph.nodes(), &Lb.graph.ports()})
          for (const auto& [y, battrs] : *mb) {
            if (Ra.graph.has_node(x) != Lb.graph.has_node(y)) continue;
            for (const auto& u : Lb.attrs_with(y, Part::Cut))
              if (may_equal(t, u))
                if (auto o = attempt({{x, y}}, "attribute " + render(t) + " of " + x + "~" + render(u) + " of " + y))
                  return o;
          }
    }
  return std::nullopt;
}

}  // namespace

CompatibilityReport check_compatibility(const EsrRule& r1, const EsrRule& r2) {
  CompatibilityReport out;
  if (auto o = find_conflict(r1, r2, false)) {
    out.compatible = false;
    out.counterexample = std::move(o);
  } else if (auto o2 = find_conflict(r2, r1, true)) {
    out.compatible = false;
    out.counterexample = std::move(o2);
  }
  return out;
}

ConflictFreedomReport check_conflict_free(const std::vector<EsrRule>& rules) {
  ConflictFreedomReport out;
  for (std::size_t i = 0; i < rules.size(); ++i)
    for (std::size_t j = i; j < rules.size(); ++j) {
      auto c = check_compatibility(rules[i], rules[j]);
      if (c.compatible) continue;
      out.incompatible.emplace_back(rules[i].name, rules[j].name);
      if (out.conflict_free) {
        out.conflict_free = false;
        out.failing_pair = std::pair{rules[i].name, rules[j].name};
        out.overlap = c.counterexample;
      }
    }
  return out;
}

namespace {

std::string describe(const std::string& rule, const std::vector<RuleViolation>& v) {
  std::ostringstream os;
  os << "rule '" << rule << "' is invalid";
  for (const auto& x : v) os << "; (" << x.constraint << ") " << x.message;
  return os.str();
}

}  // namespace

InvalidRule::InvalidRule(const std::string& rule, std::vector<RuleViolation> violations)
    : std::runtime_error(describe(rule, violations)), violations_(std::move(violations)) {}

RuleSystem::RuleSystem(std::vector<EsrRule> rules) : rules_(std::move(rules)) {
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    if (!by_name_.emplace(rules_[i].name, i).second)
      throw std::invalid_argument("duplicate rule name '" + rules_[i].name + "'");
    auto v = validate_rule(rules_[i]);
    if (!v.empty()) throw InvalidRule(rules_[i].name, std::move(v));
    compiled_.push_back(std::make_unique<detail::CompiledRule>(detail::compile(rules_[i])));
  }
  symmetry_.resize(rules_.size());
}

RuleSystem::~RuleSystem() = default;
RuleSystem::RuleSystem(RuleSystem&&) noexcept = default;
RuleSystem& RuleSystem::operator=(RuleSystem&&) noexcept = default;

const EsrRule& RuleSystem::rule(const std::string& name) const { return rules_.at(by_name_.at(name)); }

const detail::CompiledRule& RuleSystem::compiled(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw std::out_of_range("unknown rule '" + name + "'");
  return *compiled_[it->second];
}

void RuleSystem::verify_symmetry() {
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    if (symmetry_[i]) continue;
    symmetry_[i] = check_symmetry_condition(rules_[i]);
    if (symmetry_[i]->holds)
      compiled_[i]->lex = detail::lex_leader(symmetry_[i]->lhs, compiled_[i]->lhs.size());
  }
}

void RuleSystem::verify_conflict_freedom() {
  if (!conflict_) conflict_ = check_conflict_free(rules_);
}

const std::optional<SymmetryReport>& RuleSystem::symmetry(const std::string& name) const {
  return symmetry_.at(by_name_.at(name));
}

bool RuleSystem::parallel_safe(const std::string& name) const { return compiled(name).parallel_safe; }

}  // namespace portrewrite
