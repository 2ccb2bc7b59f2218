#include "portrewrite/matching.hpp"

#include <algorithm>
#include <random>
#include <tuple>

#include "pattern.hpp"

namespace portrewrite {

std::map<Id, Id> Match::variant_nodes() const {
  std::map<Id, Id> out;
  for (const auto& [x, y] : nodes) out[x + variant_suffix(tag)] = y;
  return out;
}

std::map<Id, Id> Match::variant_ports() const {
  std::map<Id, Id> out;
  for (const auto& [x, y] : ports) out[x + variant_suffix(tag)] = y;
  return out;
}

Substitution Match::variant_subst() const {
  Substitution out;
  for (const auto& [x, v] : subst) out[x + variant_suffix(tag)] = v;
  return out;
}

const Id& Match::image(const Id& lhs_element) const {
  if (auto it = nodes.find(lhs_element); it != nodes.end()) return it->second;
  if (auto it = ports.find(lhs_element); it != ports.end()) return it->second;
  throw std::out_of_range("match of '" + rule_name() + "' has no image for '" + lhs_element + "'");
}

std::vector<Id> Match::image_sequence() const {
  std::vector<Id> out;
  out.reserve(nodes.size() + ports.size());
  for (const auto& [x, y] : nodes) out.push_back(y);
  for (const auto& [x, y] : ports) out.push_back(y);
  return out;
}

namespace {

using Key = std::tuple<std::string, std::vector<Id>, std::vector<Id>, std::string>;

Key key_of(const Match& m) {
  auto seq = m.image_sequence();
  auto sorted = seq;
  std::sort(sorted.begin(), sorted.end());
  return {m.rule_name(), std::move(sorted), std::move(seq), render(m.subst)};
}

void sort_matches(std::vector<Match>& ms) {
  std::vector<std::pair<Key, std::size_t>> keys;
  keys.reserve(ms.size());
  for (std::size_t i = 0; i < ms.size(); ++i) keys.emplace_back(key_of(ms[i]), i);
  std::sort(keys.begin(), keys.end());
  std::vector<Match> out;
  out.reserve(ms.size());
  for (auto& [k, i] : keys) out.push_back(std::move(ms[i]));
  ms = std::move(out);
}

void retag(std::vector<Match>& ms) {
  for (std::size_t i = 0; i < ms.size(); ++i) ms[i].tag = std::to_string(i + 1);
}

bool same_subst(const Substitution& a, const Substitution& b) {
  if (a.size() != b.size()) return false;
  for (const auto& [x, v] : a) {
    auto it = b.find(x);
    if (it == b.end() || !approx_equal(v, it->second)) return false;
  }
  return true;
}

bool injective(const Substitution& s) {
  std::vector<AttrValue> seen;
  for (const auto& [x, v] : s) {
    if (contains_approx(seen, v)) return false;
    seen.push_back(v);
  }
  return true;
}

// Backtracking search for homomorphisms of a rule lhs into a host graph.
class Matcher {
 public:
  Matcher(std::shared_ptr<const EsrRule> rule, const detail::SideIndex& lhs, const Pregraph& host,
          const std::vector<std::pair<int, int>>& less, MatchOptions options)
      : rule_(std::move(rule)), l_(lhs), g_(host), h_(detail::SideIndex::of(host)), options_(options) {
    std::size_t n = l_.size();
    terms_.resize(n);
    ground_.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
      terms_[v] = rule_->lhs.graph.attrs(l_.ids[v]);
      for (const auto& t : terms_[v]) {
        if (!t.is_ground()) continue;
        try {
          ground_[v].push_back(evaluate(t, {}));
        } catch (const EvalError&) {
          impossible_ = true;
        }
      }
    }
    less_.resize(n);
    for (auto [a, b] : less) {
      less_[a].emplace_back(a, b);
      less_[b].emplace_back(a, b);
    }
    build_order();
    fwd_.assign(n, -1);
    bwd_.assign(h_.size(), -1);
  }

  std::vector<Match> run() {
    if (!impossible_) extend(0);
    return std::move(out_);
  }

 private:
  void build_order() {
    std::size_t n = l_.size();
    std::vector<bool> seen(n, false);
    auto degree = [&](int v) {
      if (!l_.is_port(v)) return static_cast<int>(l_.node_ports[v].size());
      return (l_.port_node[v] >= 0 ? 1 : 0) + (l_.port_link[v] >= 0 ? 1 : 0);
    };
    std::function<void(int)> visit = [&](int v) {
      if (v < 0 || seen[v]) return;
      seen[v] = true;
      order_.push_back(v);
      if (l_.is_port(v)) {
        visit(l_.port_link[v]);
        visit(l_.port_node[v]);
      } else {
        for (int p : l_.node_ports[v]) visit(p);
      }
    };
    while (order_.size() < n) {
      int best = -1;
      for (std::size_t v = 0; v < n; ++v)
        if (!seen[v] && (best < 0 || degree(static_cast<int>(v)) > degree(best))) best = static_cast<int>(v);
      visit(best);
    }
  }

  std::vector<int> candidates(int u) const {
    if (l_.is_port(u)) {
      int l = l_.port_link[u];
      if (l >= 0 && fwd_[l] >= 0) return {h_.port_link[fwd_[l]]};
      int n = l_.port_node[u];
      if (n >= 0 && fwd_[n] >= 0) return h_.node_ports[fwd_[n]];
    } else {
      for (int p : l_.node_ports[u])
        if (fwd_[p] >= 0) return {h_.port_node[fwd_[p]]};
    }
    std::vector<int> all;
    std::size_t lo = l_.is_port(u) ? h_.node_count : 0, hi = l_.is_port(u) ? h_.size() : h_.node_count;
    for (std::size_t w = lo; w < hi; ++w) all.push_back(static_cast<int>(w));
    return all;
  }

  bool fits(int u, int w) const {
    if (w < 0 || bwd_[w] >= 0 || l_.is_port(u) != h_.is_port(w)) return false;
    if (l_.is_port(u)) {
      int n = l_.port_node[u];
      if (n >= 0 && (h_.port_node[w] < 0 || (fwd_[n] >= 0 && fwd_[n] != h_.port_node[w]))) return false;
      int l = l_.port_link[u];
      if (l >= 0 && (h_.port_link[w] < 0 || (fwd_[l] >= 0 && fwd_[l] != h_.port_link[w]))) return false;
    } else {
      for (int p : l_.node_ports[u])
        if (fwd_[p] >= 0 && h_.port_node[fwd_[p]] != w) return false;
    }
    for (auto [a, b] : less_[u]) {
      int ia = a == u ? w : fwd_[a], ib = b == u ? w : fwd_[b];
      if (ia >= 0 && ib >= 0 && !(ia < ib)) return false;
    }
    const auto& target = g_.attrs(h_.ids[w]);
    for (const auto& v : ground_[u])
      if (!contains_approx(target, v)) return false;
    return true;
  }

  void extend(std::size_t k) {
    if (k == order_.size()) {
      emit();
      return;
    }
    int u = order_[k];
    for (int w : candidates(u)) {
      if (!fits(u, w)) continue;
      fwd_[u] = w;
      bwd_[w] = u;
      extend(k + 1);
      fwd_[u] = -1;
      bwd_[w] = -1;
    }
  }

  void emit() {
    AttrMatchOptions defer;
    defer.defer_unbound = true;
    std::vector<Substitution> current{{}};
    for (int v : order_) {
      if (terms_[v].empty()) continue;
      std::vector<Substitution> next;
      for (const auto& s : current)
        for (auto& s2 : match_attr_sets(terms_[v], g_.attrs(h_.ids[fwd_[v]]), s, defer)) next.push_back(std::move(s2));
      current = std::move(next);
      if (current.empty()) return;
    }
    std::vector<Substitution> accepted;
    for (auto& s : current) {
      if (!complete(s) || (options_.strict_attrs && !injective(s))) continue;
      bool dup = false;
      for (const auto& t : accepted) dup = dup || same_subst(t, s);
      if (!dup) accepted.push_back(std::move(s));
    }
    for (auto& s : accepted) {
      Match m;
      m.rule = rule_;
      for (std::size_t v = 0; v < l_.size(); ++v) {
        auto& into = l_.is_port(static_cast<int>(v)) ? m.ports : m.nodes;
        into[l_.ids[v]] = h_.ids[fwd_[v]];
      }
      m.subst = std::move(s);
      out_.push_back(std::move(m));
    }
  }

  // Every term, including the deferred compound ones, lands in its target.
  bool complete(const Substitution& s) const {
    for (std::size_t v = 0; v < l_.size(); ++v) {
      const auto& target = g_.attrs(h_.ids[fwd_[v]]);
      for (const auto& t : terms_[v]) {
        try {
          if (!contains_approx(target, evaluate(t, s))) return false;
        } catch (const EvalError&) {
          return false;
        }
      }
    }
    return true;
  }

  std::shared_ptr<const EsrRule> rule_;
  const detail::SideIndex& l_;
  const Pregraph& g_;
  detail::SideIndex h_;
  MatchOptions options_;
  std::vector<std::vector<AttrTerm>> terms_;
  std::vector<std::vector<AttrValue>> ground_;
  std::vector<std::vector<std::pair<int, int>>> less_;
  bool impossible_ = false;
  std::vector<int> order_;
  std::vector<int> fwd_, bwd_;
  std::vector<Match> out_;
};

std::vector<Match> raw_matches(std::shared_ptr<const EsrRule> r, const detail::SideIndex& lhs, const Pregraph& g,
                               const std::vector<std::pair<int, int>>& less, MatchOptions options) {
  return Matcher(std::move(r), lhs, g, less, options).run();
}

// s'(x) = s(h(x)): the substitution of the match composed with h.
Substitution compose(const Substitution& s, const std::map<std::string, std::string>& h) {
  Substitution out;
  for (const auto& [x, v] : s) {
    auto it = h.find(x);
    out[x] = it == h.end() ? v : s.at(it->second);
  }
  return out;
}

}  // namespace

bool match_less(const Match& a, const Match& b) { return key_of(a) < key_of(b); }

std::vector<Match> enumerate_matches(std::shared_ptr<const EsrRule> r, const GraphWitness& g, MatchOptions options) {
  auto lhs = detail::SideIndex::of(r->lhs);
  auto out = raw_matches(std::move(r), lhs, g.graph(), {}, options);
  sort_matches(out);
  retag(out);
  return out;
}

std::vector<Match> enumerate_matches(const EsrRule& r, const GraphWitness& g, MatchOptions options) {
  return enumerate_matches(std::make_shared<const EsrRule>(r), g, options);
}

std::optional<std::string> check_match(const Match& m, const Pregraph& g) {
  const auto& L = m.rule->lhs.graph;
  for (const auto& [n, a] : L.nodes()) {
    auto it = m.nodes.find(n);
    if (it == m.nodes.end()) return "no image for node '" + n + "'";
    if (!g.has_node(it->second)) return "node '" + it->second + "' is not in the graph";
  }
  for (const auto& [p, a] : L.ports()) {
    auto it = m.ports.find(p);
    if (it == m.ports.end()) return "no image for port '" + p + "'";
    if (!g.has_port(it->second)) return "port '" + it->second + "' is not in the graph";
  }
  for (const auto& [p, n] : L.pn())
    if (!g.has_pn(m.ports.at(p), m.nodes.at(n)))
      return "pn (" + m.ports.at(p) + "," + m.nodes.at(n) + ") is not in the graph";
  for (const auto& [p, q] : L.pp())
    if (!g.has_pp(m.ports.at(p), m.ports.at(q)))
      return "pp (" + m.ports.at(p) + "," + m.ports.at(q) + ") is not in the graph";
  for (const auto* elems : {&L.nodes(), &L.ports()})
    for (const auto& [x, terms] : *elems)
      for (const auto& t : terms) {
        try {
          if (!contains_approx(g.attrs(m.image(x)), evaluate(t, m.subst)))
            return "attribute " + render(t) + " of '" + x + "' has no counterpart";
        } catch (const EvalError& e) {
          return std::string("attribute evaluation failed: ") + e.what();
        }
      }
  return std::nullopt;
}

bool matches_equivalent(const Match& a, const Match& b) {
  return a.rule_name() == b.rule_name() && a.nodes == b.nodes && a.ports == b.ports && same_subst(a.subst, b.subst);
}

bool matches_auto_equivalent(const Match& a, const Match& b, const AutomorphismList& auts) {
  if (a.rule_name() != b.rule_name()) return false;
  const auto& ids = auts.elements();
  for (std::size_t i = 0; i < auts.size(); ++i) {
    const auto& h = auts.perm(i);
    bool ok = true;
    for (std::size_t v = 0; v < ids.size() && ok; ++v) ok = a.image(ids[v]) == b.image(ids[h[v]]);
    if (ok && same_subst(a.subst, compose(b.subst, auts.vars(i)))) return true;
  }
  return false;
}

bool matches_auto_equivalent(const Match& a, const Match& b) {
  return matches_auto_equivalent(a, b, enumerate_automorphisms(a.rule->lhs));
}

std::vector<std::vector<Match>> auto_match_classes(const EsrRule& r, const GraphWitness& g, MatchOptions options) {
  auto all = enumerate_matches(r, g, options);
  auto auts = enumerate_automorphisms(r.lhs);
  const auto& ids = auts.elements();
  // Class key: the least (image sequence, substitution) over the orbit.
  std::map<std::pair<std::vector<Id>, std::string>, std::vector<Match>> classes;
  for (auto& m : all) {
    std::optional<std::pair<std::vector<Id>, std::string>> best;
    for (std::size_t i = 0; i < auts.size(); ++i) {
      std::vector<Id> seq;
      for (std::size_t v = 0; v < ids.size(); ++v) seq.push_back(m.image(ids[auts.perm(i)[v]]));
      std::pair key{std::move(seq), render(compose(m.subst, auts.vars(i)))};
      if (!best || key < *best) best = std::move(key);
    }
    classes[*best].push_back(std::move(m));
  }
  std::vector<std::vector<Match>> out;
  for (auto& [k, ms] : classes) out.push_back(std::move(ms));
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return match_less(x.front(), y.front()); });
  return out;
}

std::vector<Match> auto_match_set(const RuleSystem& rs, const std::string& rule, const GraphWitness& g,
                                  AutoMatchOptions options) {
  const auto& sym = rs.symmetry(rule);
  if (!sym) throw SymmetryConditionUnchecked(rule);
  if (!sym->holds) throw SymmetryConditionFailed(rule);
  const auto& c = rs.compiled(rule);
  std::vector<Match> out;
  if (options.representative_seed) {
    std::mt19937_64 rng(*options.representative_seed);
    for (auto& cls : auto_match_classes(*c.rule, g, options.match)) {
      std::uniform_int_distribution<std::size_t> pick(0, cls.size() - 1);
      out.push_back(std::move(cls[pick(rng)]));
    }
  } else {
    auto ms = raw_matches(c.rule, c.lhs, g.graph(), c.lex->less, options.match);
    // Matches with the same structure map may still differ by a variable-only
    // automorphism; keep the least substitution of each such orbit.
    for (auto& m : ms) {
      std::string mine = render(m.subst);
      bool least = true;
      for (const auto& k : c.lex->kernel) least = least && !(render(compose(m.subst, k)) < mine);
      if (least) out.push_back(std::move(m));
    }
  }
  sort_matches(out);
  retag(out);
  return out;
}

std::vector<Match> auto_match_set(const RuleSystem& rs, const GraphWitness& g, AutoMatchOptions options) {
  for (const auto& r : rs.rules()) {
    const auto& sym = rs.symmetry(r.name);
    if (!sym) throw SymmetryConditionUnchecked(r.name);
    if (!sym->holds) throw SymmetryConditionFailed(r.name);
  }
  std::vector<Match> out;
  for (const auto& r : rs.rules()) {
    if (options.representative_seed) ++*options.representative_seed;
    for (auto& m : auto_match_set(rs, r.name, g, options)) out.push_back(std::move(m));
  }
  sort_matches(out);
  retag(out);
  return out;
}

WellBehavedReport is_well_behaved(const Match& m, const GraphWitness& g) {
  WellBehavedReport out;
  const auto& L = m.rule->lhs;
  const auto& R = m.rule->rhs;
  const auto& host = g.graph();
  for (const auto& [p, attrs] : L.graph.ports()) {
    if (L.part(p) != Part::Env || !R.graph.has_port(p)) continue;
    bool gains_link = false, loses_link = false, gains_node = false, loses_node = false;
    for (const auto& q : R.graph.links_of(p)) gains_link |= R.pp_part(p, q) == Part::New;
    for (const auto& q : L.graph.links_of(p)) loses_link |= L.pp_part(p, q) == Part::Cut;
    for (const auto& n : R.graph.nodes_of(p)) gains_node |= R.pn_part(p, n) == Part::New;
    for (const auto& n : L.graph.nodes_of(p)) loses_node |= L.pn_part(p, n) == Part::Cut;
    const Id& image = m.image(p);
    bool bad = (gains_link && !loses_link && !host.links_of(image).empty()) ||
               (gains_node && !loses_node && !host.nodes_of(image).empty());
    if (bad) out.offending.push_back(image);
  }
  out.well_behaved = out.offending.empty();
  return out;
}

}  // namespace portrewrite
