#include "portrewrite/pregraph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

namespace portrewrite {

std::string to_string(GraphViolation::Kind k) {
  switch (k) {
    case GraphViolation::Kind::MultipleNodes:
      return "multiple-nodes";
    case GraphViolation::Kind::MultipleLinks:
      return "multiple-links";
    case GraphViolation::Kind::SelfLink:
      return "self-link";
  }
  return "?";
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

void sort_partition(Partition& p) {
  for (auto& c : p) std::sort(c.begin(), c.end());
  std::sort(p.begin(), p.end());
}

// Two-coloring of each pp component. Returns the color per port and whether
// the component containing it is bipartite.
struct Coloring {
  std::map<Id, int> color;
  std::map<Id, int> component;
  std::vector<bool> bipartite;
};

Coloring color_ports(const Pregraph& g) {
  Coloring c;
  for (const auto& [start, attrs] : g.ports()) {
    if (c.color.count(start)) continue;
    int comp = static_cast<int>(c.bipartite.size());
    c.bipartite.push_back(true);
    std::deque<Id> queue{start};
    c.color[start] = 0;
    c.component[start] = comp;
    while (!queue.empty()) {
      Id p = queue.front();
      queue.pop_front();
      for (const auto& q : g.links_of(p)) {
        auto it = c.color.find(q);
        if (it == c.color.end()) {
          c.color[q] = 1 - c.color[p];
          c.component[q] = comp;
          queue.push_back(q);
        } else if (it->second == c.color[p]) {
          c.bipartite[comp] = false;
        }
      }
    }
  }
  return c;
}

}  // namespace

Partition port_equivalence(const Pregraph& g) {
  Coloring c = color_ports(g);
  std::map<std::pair<int, int>, std::vector<Id>> groups;
  for (const auto& [p, color] : c.color) {
    int comp = c.component[p];
    groups[{comp, c.bipartite[comp] ? color : 0}].push_back(p);
  }
  Partition out;
  for (auto& [key, members] : groups) out.push_back(std::move(members));
  sort_partition(out);
  return out;
}

Partition node_equivalence(const Pregraph& g, const Partition& port_classes) {
  std::vector<Id> ids;
  std::unordered_map<Id, int> index;
  for (const auto& [n, attrs] : g.nodes()) {
    index[n] = static_cast<int>(ids.size());
    ids.push_back(n);
  }
  UnionFind uf(ids.size());
  for (const auto& cls : port_classes) {
    int first = -1;
    for (const auto& p : cls) {
      for (const auto& n : g.nodes_of(p)) {
        int i = index.at(n);
        if (first < 0)
          first = i;
        else
          uf.unite(first, i);
      }
    }
  }
  std::map<int, std::vector<Id>> groups;
  for (std::size_t i = 0; i < ids.size(); ++i) groups[uf.find(static_cast<int>(i))].push_back(ids[i]);
  Partition out;
  for (auto& [root, members] : groups) out.push_back(std::move(members));
  sort_partition(out);
  return out;
}

namespace {

std::map<Id, std::vector<Id>> merged_only(const std::map<Id, std::vector<Id>>& classes) {
  std::map<Id, std::vector<Id>> out;
  for (const auto& [id, members] : classes)
    if (members.size() > 1) out.emplace(id, members);
  return out;
}

}  // namespace

std::map<Id, std::vector<Id>> QuotientMap::merged_ports() const { return merged_only(port_classes); }
std::map<Id, std::vector<Id>> QuotientMap::merged_nodes() const { return merged_only(node_classes); }

Quotient quotient(const Pregraph& g) {
  Partition pe = port_equivalence(g);
  Partition ne = node_equivalence(g, pe);
  Quotient q;
  for (const auto& cls : pe) {
    const Id& id = cls.front();
    q.map.port_classes[id] = cls;
    std::vector<AttrValue> attrs;
    for (const auto& p : cls) {
      q.map.port_class[p] = id;
      const auto& a = g.attrs(p);
      attrs.insert(attrs.end(), a.begin(), a.end());
    }
    q.graph.add_port(id, std::move(attrs));
  }
  for (const auto& cls : ne) {
    const Id& id = cls.front();
    q.map.node_classes[id] = cls;
    std::vector<AttrValue> attrs;
    for (const auto& n : cls) {
      q.map.node_class[n] = id;
      const auto& a = g.attrs(n);
      attrs.insert(attrs.end(), a.begin(), a.end());
    }
    q.graph.add_node(id, std::move(attrs));
  }
  for (const auto& [p, n] : g.pn()) q.graph.add_pn(q.map.port_class.at(p), q.map.node_class.at(n));
  for (const auto& [a, b] : g.pp()) q.graph.add_pp(q.map.port_class.at(a), q.map.port_class.at(b));
  return q;
}

bool has_odd_loop(const Pregraph& g) {
  Coloring c = color_ports(g);
  return std::find(c.bipartite.begin(), c.bipartite.end(), false) != c.bipartite.end();
}

bool same_attr_set(const std::vector<AttrValue>& a, const std::vector<AttrValue>& b) {
  if (a.size() != b.size()) return false;
  for (const auto& x : a)
    if (!contains_approx(b, x)) return false;
  for (const auto& x : b)
    if (!contains_approx(a, x)) return false;
  return true;
}

namespace {

// Both graphs flattened into vertices (nodes then ports) with typed adjacency.
// Edge types: 0 port->node, 1 node->port, 2 port-port.
struct IsoSide {
  std::vector<Id> ids;
  std::size_t node_count = 0;
  std::vector<const std::vector<AttrValue>*> attrs;
  std::vector<std::vector<std::pair<int, int>>> adj;  // (type, neighbor)
  std::vector<bool> self_link;
  std::unordered_set<std::uint64_t> edges;

  explicit IsoSide(const Pregraph& g) {
    std::unordered_map<Id, int> index;
    for (const auto& [n, a] : g.nodes()) {
      index[n] = static_cast<int>(ids.size());
      ids.push_back(n);
      attrs.push_back(&a);
    }
    node_count = ids.size();
    for (const auto& [p, a] : g.ports()) {
      index[p] = static_cast<int>(ids.size());
      ids.push_back(p);
      attrs.push_back(&a);
    }
    adj.resize(ids.size());
    self_link.assign(ids.size(), false);
    for (const auto& [p, n] : g.pn()) add(index.at(p), index.at(n), 0, 1);
    for (const auto& [a, b] : g.pp()) {
      int x = index.at(a), y = index.at(b);
      if (x == y)
        self_link[x] = true;
      else
        add(x, y, 2, 2);
    }
  }

  void add(int x, int y, int t, int back) {
    adj[x].emplace_back(t, y);
    adj[y].emplace_back(back, x);
    edges.insert(key(x, y, t));
    edges.insert(key(y, x, back));
  }

  static std::uint64_t key(int x, int y, int t) {
    return (static_cast<std::uint64_t>(x) << 34) | (static_cast<std::uint64_t>(y) << 2) |
           static_cast<std::uint64_t>(t);
  }
  bool has_edge(int x, int y, int t) const { return edges.count(key(x, y, t)) > 0; }
};

// Numbers that are approximately equal share a cluster id, so colors computed
// from attributes never separate values the exact check would accept.
class NumberClusters {
 public:
  void add(double v) { values_.push_back(v); }
  void freeze() {
    std::sort(values_.begin(), values_.end());
    int id = -1;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (i == 0 || !approx_equal(values_[i - 1], values_[i])) ++id;
      ids_.push_back(id);
    }
  }
  int id(double v) const {
    auto it = std::lower_bound(values_.begin(), values_.end(), v);
    return ids_[static_cast<std::size_t>(it - values_.begin())];
  }

 private:
  std::vector<double> values_;
  std::vector<int> ids_;
};

std::vector<std::int64_t> attr_key(const std::vector<AttrValue>& set, const NumberClusters& nc,
                                   std::map<std::string, int>& tags) {
  std::vector<std::int64_t> out;
  for (const auto& v : set) {
    switch (v.kind()) {
      case AttrKind::Number:
        out.push_back(0);
        out.push_back(nc.id(v.as_number()));
        break;
      case AttrKind::Tag: {
        auto it = tags.emplace(v.as_tag(), static_cast<int>(tags.size())).first;
        out.push_back(1);
        out.push_back(it->second);
        break;
      }
      case AttrKind::Vector:
        out.push_back(2);
        out.push_back(nc.id(v.as_vector().x));
        out.push_back(nc.id(v.as_vector().y));
        break;
    }
  }
  // Set order by value may differ across clusters; sort the encoded triples.
  std::vector<std::vector<std::int64_t>> items;
  for (std::size_t i = 0; i < out.size();) {
    std::size_t len = out[i] == 2 ? 3 : 2;
    items.emplace_back(out.begin() + static_cast<long>(i), out.begin() + static_cast<long>(i + len));
    i += len;
  }
  std::sort(items.begin(), items.end());
  std::vector<std::int64_t> flat;
  for (auto& it : items) flat.insert(flat.end(), it.begin(), it.end());
  return flat;
}

// Individualization-refinement: refine both colorings jointly to a stable
// partition, then branch on one element of the smallest ambiguous class.
class IsoSearch {
 public:
  IsoSearch(const IsoSide& a, const IsoSide& b) : a_(a), b_(b) {}

  std::optional<std::vector<int>> run() {
    if (a_.ids.size() != b_.ids.size() || a_.node_count != b_.node_count) return std::nullopt;
    if (a_.edges.size() != b_.edges.size()) return std::nullopt;
    std::vector<int> ca, cb;
    initial(ca, cb);
    std::vector<int> f;
    if (!search(std::move(ca), std::move(cb), f)) return std::nullopt;
    return f;
  }

 private:
  void initial(std::vector<int>& ca, std::vector<int>& cb) const {
    NumberClusters nc;
    for (const IsoSide* s : {&a_, &b_})
      for (const auto* set : s->attrs)
        for (const auto& v : *set) {
          if (v.kind() == AttrKind::Number) nc.add(v.as_number());
          if (v.kind() == AttrKind::Vector) {
            nc.add(v.as_vector().x);
            nc.add(v.as_vector().y);
          }
        }
    nc.freeze();
    std::map<std::string, int> tags;
    std::map<std::vector<std::int64_t>, int> palette;
    auto color = [&](const IsoSide& s, std::vector<int>& colors) {
      colors.resize(s.ids.size());
      for (std::size_t i = 0; i < s.ids.size(); ++i) {
        std::vector<std::int64_t> k{i < s.node_count ? 0 : 1, s.self_link[i] ? 1 : 0};
        auto ak = attr_key(*s.attrs[i], nc, tags);
        k.insert(k.end(), ak.begin(), ak.end());
        colors[i] = palette.emplace(std::move(k), static_cast<int>(palette.size())).first->second;
      }
    };
    color(a_, ca);
    color(b_, cb);
  }

  static bool same_histogram(const std::vector<int>& ca, const std::vector<int>& cb) {
    std::map<int, int> hist;
    for (std::size_t i = 0; i < ca.size(); ++i) {
      ++hist[ca[i]];
      --hist[cb[i]];
    }
    return std::all_of(hist.begin(), hist.end(), [](const auto& kv) { return kv.second == 0; });
  }

  static std::size_t class_count(const std::vector<int>& c) { return std::set<int>(c.begin(), c.end()).size(); }

  // False when the two sides stop agreeing on class sizes.
  bool refine(std::vector<int>& ca, std::vector<int>& cb) const {
    if (!same_histogram(ca, cb)) return false;
    std::size_t classes = class_count(ca);
    while (true) {
      std::map<std::vector<std::int64_t>, int> next;
      auto step = [&](const IsoSide& s, const std::vector<int>& colors) {
        std::vector<int> out(s.ids.size());
        for (std::size_t i = 0; i < s.ids.size(); ++i) {
          std::vector<std::int64_t> nb;
          nb.reserve(s.adj[i].size() + 1);
          for (const auto& [t, j] : s.adj[i]) nb.push_back(static_cast<std::int64_t>(colors[j]) * 4 + t);
          std::sort(nb.begin(), nb.end());
          nb.insert(nb.begin(), colors[i]);
          out[i] = next.emplace(std::move(nb), static_cast<int>(next.size())).first->second;
        }
        return out;
      };
      auto na = step(a_, ca);
      auto nb = step(b_, cb);
      ca = std::move(na);
      cb = std::move(nb);
      if (!same_histogram(ca, cb)) return false;
      std::size_t now = class_count(ca);
      if (now <= classes) return true;
      classes = now;
    }
  }

  bool verify(const std::vector<int>& f) const {
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (!same_attr_set(*a_.attrs[i], *b_.attrs[static_cast<std::size_t>(f[i])])) return false;
      for (const auto& [t, j] : a_.adj[i])
        if (!b_.has_edge(f[i], f[static_cast<std::size_t>(j)], t)) return false;
    }
    return true;
  }

  bool search(std::vector<int> ca, std::vector<int> cb, std::vector<int>& f) const {
    if (!refine(ca, cb)) return false;
    std::map<int, int> size;
    for (int c : ca) ++size[c];
    int pick = -1;
    for (const auto& [c, n] : size)
      if (n > 1 && (pick < 0 || n < size[pick])) pick = c;
    if (pick < 0) {
      std::map<int, int> where;
      for (std::size_t j = 0; j < cb.size(); ++j) where[cb[j]] = static_cast<int>(j);
      f.assign(ca.size(), -1);
      for (std::size_t i = 0; i < ca.size(); ++i) f[i] = where.at(ca[i]);
      return verify(f);
    }
    int fresh = *std::max_element(ca.begin(), ca.end()) + 1;
    std::size_t u = static_cast<std::size_t>(std::find(ca.begin(), ca.end(), pick) - ca.begin());
    for (std::size_t w = 0; w < cb.size(); ++w) {
      if (cb[w] != pick) continue;
      auto ca2 = ca;
      auto cb2 = cb;
      ca2[u] = fresh;
      cb2[w] = fresh;
      if (search(std::move(ca2), std::move(cb2), f)) return true;
    }
    return false;
  }

  const IsoSide& a_;
  const IsoSide& b_;
};

}  // namespace

std::optional<Isomorphism> is_isomorphic(const Pregraph& g1, const Pregraph& g2) {
  if (g1.nodes().size() != g2.nodes().size() || g1.ports().size() != g2.ports().size() ||
      g1.pn().size() != g2.pn().size() || g1.pp().size() != g2.pp().size())
    return std::nullopt;
  IsoSide a(g1), b(g2);
  auto f = IsoSearch(a, b).run();
  if (!f) return std::nullopt;
  Isomorphism iso;
  for (std::size_t i = 0; i < a.ids.size(); ++i) {
    if (i < a.node_count)
      iso.nodes[a.ids[i]] = b.ids[(*f)[i]];
    else
      iso.ports[a.ids[i]] = b.ids[(*f)[i]];
  }
  return iso;
}

bool pregraphs_equivalent(const Pregraph& g1, const Pregraph& g2) {
  return is_isomorphic(quotient(g1).graph, quotient(g2).graph).has_value();
}

}  // namespace portrewrite
