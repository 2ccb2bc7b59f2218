#include "pattern.hpp"

#include <algorithm>
#include <deque>

namespace portrewrite::detail {

namespace {

template <class A, class F>
SideIndex build(const BasicPregraph<A>& g, const F& entries_of, Part default_part,
                const RuleSide* side) {
  SideIndex s;
  for (const auto& [n, a] : g.nodes()) {
    s.index[n] = static_cast<int>(s.ids.size());
    s.ids.push_back(n);
  }
  s.node_count = s.ids.size();
  for (const auto& [p, a] : g.ports()) {
    s.index[p] = static_cast<int>(s.ids.size());
    s.ids.push_back(p);
  }
  std::size_t n = s.ids.size();
  s.part.assign(n, default_part);
  s.port_node.assign(n, -1);
  s.pn_part.assign(n, default_part);
  s.port_link.assign(n, -1);
  s.pp_part.assign(n, default_part);
  s.node_ports.resize(n);
  s.attrs.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (side) s.part[v] = side->part(s.ids[v]);
    s.attrs[v] = entries_of(s.ids[v]);
  }
  for (const auto& [p, node] : g.pn()) {
    int pi = s.index.at(p), ni = s.index.at(node);
    s.port_node[pi] = ni;
    s.node_ports[ni].push_back(pi);
    if (side) s.pn_part[pi] = side->pn_part(p, node);
  }
  for (const auto& [a, b] : g.pp()) {
    int x = s.index.at(a), y = s.index.at(b);
    s.port_link[x] = y;
    s.port_link[y] = x;
    if (side) s.pp_part[x] = s.pp_part[y] = side->pp_part(a, b);
  }
  return s;
}

}  // namespace

SideIndex SideIndex::of(const RuleSide& side) {
  return build(
      side.graph,
      [&](const Id& id) {
        std::vector<Entry> out;
        for (const auto& t : side.graph.attrs(id)) out.push_back({canonical(t), side.attr_part(id, t)});
        return out;
      },
      Part::Env, &side);
}

SideIndex SideIndex::of(const Pregraph& g) {
  return build(
      g,
      [&](const Id& id) {
        std::vector<Entry> out;
        for (const auto& v : g.attrs(id)) out.push_back({AttrTerm::constant(v), Part::Env});
        return out;
      },
      Part::Env, nullptr);
}

bool VarBijection::bind(const std::string& a, const std::string& b) {
  auto f = fwd_.find(a);
  if (f != fwd_.end()) return f->second == b;
  if (locked_ || bwd_.count(b)) return false;
  fwd_.emplace(a, b);
  bwd_.emplace(b, a);
  trail_.push_back(a);
  return true;
}

void VarBijection::undo(std::size_t mark) {
  while (trail_.size() > mark) {
    auto it = fwd_.find(trail_.back());
    bwd_.erase(it->second);
    fwd_.erase(it);
    trail_.pop_back();
  }
}

namespace {

using Cont = std::function<bool()>;

bool is_ac(TermOp op) { return op == TermOp::Add || op == TermOp::Mul || op == TermOp::Eq; }

bool match_term(const AttrTerm& x, const AttrTerm& y, VarBijection& vb, const Cont& k);

bool match_args_seq(const std::vector<AttrTerm>& xs, const std::vector<AttrTerm>& ys, std::size_t i,
                    VarBijection& vb, const Cont& k) {
  if (i == xs.size()) return k();
  return match_term(xs[i], ys[i], vb, [&] { return match_args_seq(xs, ys, i + 1, vb, k); });
}

bool match_args_perm(const std::vector<AttrTerm>& xs, const std::vector<AttrTerm>& ys, std::size_t i,
                     std::vector<bool>& used, VarBijection& vb, const Cont& k) {
  if (i == xs.size()) return k();
  for (std::size_t j = 0; j < ys.size(); ++j) {
    if (used[j] || ys[j].op() != xs[i].op()) continue;
    used[j] = true;
    bool stop = match_term(xs[i], ys[j], vb, [&] { return match_args_perm(xs, ys, i + 1, used, vb, k); });
    used[j] = false;
    if (stop) return true;
  }
  return false;
}

// Continuation-passing matching of x against y up to a consistent variable
// renaming and argument order of add, mul and eq.
bool match_term(const AttrTerm& x, const AttrTerm& y, VarBijection& vb, const Cont& k) {
  if (x.op() != y.op() || x.args().size() != y.args().size()) return false;
  switch (x.op()) {
    case TermOp::Const:
    case TermOp::Sqrt:
      return approx_equal(x.value(), y.value()) && k();
    case TermOp::Var: {
      auto m = vb.mark();
      bool stop = vb.bind(x.name(), y.name()) && k();
      vb.undo(m);
      return stop;
    }
    case TermOp::Scale:
      if (!(x.factor() == y.factor())) return false;
      break;
    default:
      break;
  }
  if (is_ac(x.op())) {
    std::vector<bool> used(y.args().size(), false);
    return match_args_perm(x.args(), y.args(), 0, used, vb, k);
  }
  return match_args_seq(x.args(), y.args(), 0, vb, k);
}

bool match_entries(const std::vector<Entry>& xs, const std::vector<Entry>& ys, std::size_t i,
                   std::vector<bool>& used, VarBijection& vb, const Cont& k) {
  if (i == xs.size()) return k();
  for (std::size_t j = 0; j < ys.size(); ++j) {
    if (used[j] || ys[j].part != xs[i].part) continue;
    used[j] = true;
    bool stop =
        match_term(xs[i].term, ys[j].term, vb, [&] { return match_entries(xs, ys, i + 1, used, vb, k); });
    used[j] = false;
    if (stop) return true;
  }
  return false;
}

class Search {
 public:
  Search(const SideIndex& a, const SideIndex& b, const IsoOptions& o,
         const std::function<bool(const std::vector<int>&, const std::map<std::string, std::string>&)>& cb)
      : a_(a), b_(b), opt_(o), cb_(cb) {}

  bool run() {
    if (a_.size() != b_.size() || a_.node_count != b_.node_count) return false;
    for (const auto& [x, y] : opt_.var_preset)
      if (!vb_.bind(x, y)) return false;
    if (opt_.vars_locked) vb_.lock();
    fwd_.assign(a_.size(), -1);
    bwd_.assign(b_.size(), -1);
    build_order();
    return extend(0);
  }

 private:
  int fixed(int u) const {
    return opt_.fixed.empty() ? -1 : opt_.fixed[static_cast<std::size_t>(u)];
  }

  void build_order() {
    std::vector<bool> seen(a_.size(), false);
    std::vector<int> seeds;
    for (std::size_t u = 0; u < a_.size(); ++u)
      if (fixed(static_cast<int>(u)) >= 0) seeds.push_back(static_cast<int>(u));
    for (std::size_t u = 0; u < a_.size(); ++u) seeds.push_back(static_cast<int>(u));
    for (int s : seeds) {
      if (seen[s]) continue;
      std::deque<int> queue{s};
      seen[s] = true;
      while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        order_.push_back(v);
        auto visit = [&](int w) {
          if (w >= 0 && !seen[w]) {
            seen[w] = true;
            queue.push_back(w);
          }
        };
        if (a_.is_port(v)) {
          visit(a_.port_link[v]);
          visit(a_.port_node[v]);
        } else {
          for (int p : a_.node_ports[v]) visit(p);
        }
      }
    }
  }

  bool structural(int u, int w) const {
    if (a_.is_port(u) != b_.is_port(w) || a_.part[u] != b_.part[w]) return false;
    if (a_.attrs[u].size() != b_.attrs[w].size()) return false;
    if (a_.is_port(u)) {
      int n = a_.port_node[u], bn = b_.port_node[w];
      if ((n < 0) != (bn < 0)) return false;
      if (n >= 0) {
        if (a_.pn_part[u] != b_.pn_part[w]) return false;
        if (fwd_[n] >= 0 ? fwd_[n] != bn : bwd_[bn] >= 0) return false;
      }
      int l = a_.port_link[u], bl = b_.port_link[w];
      if ((l < 0) != (bl < 0)) return false;
      if (l >= 0) {
        if (a_.pp_part[u] != b_.pp_part[w]) return false;
        if (l == u) return bl == w;
        if (fwd_[l] >= 0 ? fwd_[l] != bl : bwd_[bl] >= 0) return false;
      }
      return true;
    }
    if (a_.node_ports[u].size() != b_.node_ports[w].size()) return false;
    for (int p : a_.node_ports[u])
      if (fwd_[p] >= 0 && b_.port_node[fwd_[p]] != w) return false;
    for (int q : b_.node_ports[w])
      if (bwd_[q] >= 0 && a_.port_node[bwd_[q]] != u) return false;
    return true;
  }

  std::vector<int> candidates(int u) const {
    if (int f = fixed(u); f >= 0) return {f};
    if (a_.is_port(u)) {
      int l = a_.port_link[u];
      if (l >= 0 && fwd_[l] >= 0) return {b_.port_link[fwd_[l]]};
      int n = a_.port_node[u];
      if (n >= 0 && fwd_[n] >= 0) return b_.node_ports[fwd_[n]];
    } else {
      for (int p : a_.node_ports[u])
        if (fwd_[p] >= 0) return {b_.port_node[fwd_[p]]};
    }
    std::vector<int> all;
    std::size_t lo = a_.is_port(u) ? b_.node_count : 0, hi = a_.is_port(u) ? b_.size() : b_.node_count;
    for (std::size_t w = lo; w < hi; ++w) all.push_back(static_cast<int>(w));
    return all;
  }

  bool extend(std::size_t k) {
    if (k == order_.size()) return cb_(fwd_, vb_.forward());
    int u = order_[k];
    for (int w : candidates(u)) {
      if (w < 0 || bwd_[w] >= 0 || !structural(u, w)) continue;
      fwd_[u] = w;
      bwd_[w] = u;
      std::vector<bool> used(b_.attrs[w].size(), false);
      bool stop = match_entries(a_.attrs[u], b_.attrs[w], 0, used, vb_, [&] { return extend(k + 1); });
      fwd_[u] = -1;
      bwd_[w] = -1;
      if (stop) return true;
    }
    return false;
  }

  const SideIndex& a_;
  const SideIndex& b_;
  const IsoOptions& opt_;
  const std::function<bool(const std::vector<int>&, const std::map<std::string, std::string>&)>& cb_;
  VarBijection vb_;
  std::vector<int> fwd_, bwd_;
  std::vector<int> order_;
};

}  // namespace

bool search_isomorphisms(
    const SideIndex& a, const SideIndex& b, const IsoOptions& options,
    const std::function<bool(const std::vector<int>&, const std::map<std::string, std::string>&)>& on_found) {
  return Search(a, b, options, on_found).run();
}

LexLeader lex_leader(const AutomorphismList& auts, std::size_t vertex_count) {
  LexLeader out;
  std::vector<std::size_t> group(auts.size());
  for (std::size_t i = 0; i < group.size(); ++i) group[i] = i;
  for (std::size_t k = 0; k < vertex_count && group.size() > 1; ++k) {
    std::set<int> orbit;
    for (auto h : group) orbit.insert(auts.perm(h)[k]);
    for (int u : orbit)
      if (u != static_cast<int>(k)) out.less.emplace_back(static_cast<int>(k), u);
    std::vector<std::size_t> stab;
    for (auto h : group)
      if (auts.perm(h)[k] == static_cast<int>(k)) stab.push_back(h);
    group = std::move(stab);
  }
  for (auto h : group)
    if (!auts.vars(h).empty()) {
      bool identity = true;
      for (const auto& [x, y] : auts.vars(h)) identity &= x == y;
      if (!identity) out.kernel.push_back(auts.vars(h));
    }
  return out;
}

CompiledRule compile(const EsrRule& r) {
  CompiledRule c;
  c.rule = std::make_shared<const EsrRule>(r);
  c.lhs = SideIndex::of(r.lhs);
  c.rhs = SideIndex::of(r.rhs);
  c.parallel_safe = check_parallel_safety(r);
  c.no_new_elements = true;
  for (const auto& [id, part] : r.rhs.parts) c.no_new_elements &= part != Part::New;
  return c;
}

}  // namespace portrewrite::detail
