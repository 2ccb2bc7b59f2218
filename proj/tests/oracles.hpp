#pragma once

// Independent reference implementations and generators shared by the tests.

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "portrewrite/pregraph.hpp"

namespace oracle {

using namespace portrewrite;

inline AttrValue num(double v) { return AttrValue::number(v); }
inline AttrValue tag(const std::string& t) { return AttrValue::tag(t); }

// Pregraph where p1 and p3 each sit on two nodes and p2 links
// to both p1 and p3.
inline Pregraph shared_ports() {
  Pregraph h;
  for (auto n : {"n1", "n2", "n4", "n5"}) h.add_node(n, {num(1)});
  h.add_node("n3", {num(2)});
  for (auto p : {"p1", "p2", "p3"}) h.add_port(p);
  h.add_pn("p1", "n1");
  h.add_pn("p1", "n2");
  h.add_pn("p2", "n5");
  h.add_pn("p3", "n3");
  h.add_pn("p3", "n4");
  h.add_pp("p1", "p2");
  h.add_pp("p2", "p3");
  return h;
}

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }
  bool chance(double p) { return std::bernoulli_distribution(p)(gen); }
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(uniform(0, static_cast<int>(v.size()) - 1))];
  }
};

// Arbitrary pregraph: ports may sit on several nodes and link to several
// ports, including themselves.
inline Pregraph random_pregraph(Rng& rng, int max_ports) {
  Pregraph g;
  int np = rng.uniform(0, max_ports);
  int nn = rng.uniform(0, std::max(1, max_ports / 2 + 1));
  std::vector<AttrValue> pool{num(0), num(1), tag("a")};
  for (int i = 0; i < nn; ++i) {
    std::vector<AttrValue> a;
    if (rng.chance(0.5)) a.push_back(rng.pick(pool));
    g.add_node("n" + std::to_string(i), a);
  }
  for (int i = 0; i < np; ++i) {
    std::vector<AttrValue> a;
    if (rng.chance(0.3)) a.push_back(rng.pick(pool));
    g.add_port("p" + std::to_string(i), a);
  }
  for (int i = 0; i < np && nn > 0; ++i) {
    int k = rng.uniform(0, 2);
    for (int j = 0; j < k; ++j) g.add_pn("p" + std::to_string(i), "n" + std::to_string(rng.uniform(0, nn - 1)));
  }
  int links = np == 0 ? 0 : rng.uniform(0, np + 1);
  for (int j = 0; j < links; ++j) {
    int a = rng.uniform(0, np - 1), b = rng.uniform(0, np - 1);
    if (a == b && !rng.chance(0.2)) continue;
    g.add_pp("p" + std::to_string(a), "p" + std::to_string(b));
  }
  return g;
}

// Random graph: every port on at most one node, links form a matching.
inline Pregraph random_graph(Rng& rng, int max_ports, const std::vector<AttrValue>& pool = {}) {
  Pregraph g;
  int np = rng.uniform(0, max_ports);
  int nn = rng.uniform(1, std::max(1, max_ports / 2));
  for (int i = 0; i < nn; ++i) {
    std::vector<AttrValue> a;
    if (!pool.empty() && rng.chance(0.6)) a.push_back(rng.pick(pool));
    g.add_node("n" + std::to_string(i), a);
  }
  std::vector<std::string> ports;
  for (int i = 0; i < np; ++i) {
    std::string p = "p" + std::to_string(i);
    std::vector<AttrValue> a;
    if (!pool.empty() && rng.chance(0.3)) a.push_back(rng.pick(pool));
    g.add_port(p, a);
    if (rng.chance(0.9)) g.add_pn(p, "n" + std::to_string(rng.uniform(0, nn - 1)));
    ports.push_back(p);
  }
  std::shuffle(ports.begin(), ports.end(), rng.gen);
  for (std::size_t i = 0; i + 1 < ports.size(); i += 2)
    if (rng.chance(0.8)) g.add_pp(ports[i], ports[i + 1]);
  return g;
}

// Fixpoint of the incremental closure rules: port pairs grow through links of
// already-equivalent ports; node pairs through equivalent ports and transitivity.
inline std::pair<Partition, Partition> brute_equivalences(const Pregraph& g) {
  std::vector<Id> ps, ns;
  for (const auto& [p, a] : g.ports()) ps.push_back(p);
  for (const auto& [n, a] : g.nodes()) ns.push_back(n);
  std::set<std::pair<Id, Id>> ep, en;
  for (const auto& p : ps) ep.insert({p, p});
  for (const auto& n : ns) en.insert({n, n});
  bool changed = true;
  while (changed) {
    changed = false;
    auto ep_old = ep;
    auto en_old = en;
    for (const auto& [q, q2] : ep_old)
      for (const auto& p1 : ps)
        for (const auto& p2 : ps)
          if (g.has_pp(q, p1) && g.has_pp(q2, p2)) changed |= ep.insert({p1, p2}).second;
    for (const auto& [p1, n1] : g.pn())
      for (const auto& [p2, n2] : g.pn())
        if (ep_old.count({p1, p2})) changed |= en.insert({n1, n2}).second;
    for (const auto& [a, b] : en_old)
      for (const auto& [c, d] : en_old)
        if (b == c) changed |= en.insert({a, d}).second;
  }
  auto classes = [](const std::vector<Id>& xs, const std::set<std::pair<Id, Id>>& rel) {
    Partition out;
    std::set<Id> done;
    for (const auto& x : xs) {
      if (done.count(x)) continue;
      std::vector<Id> cls;
      for (const auto& y : xs)
        if (rel.count({x, y})) {
          cls.push_back(y);
          done.insert(y);
        }
      out.push_back(cls);
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  return {classes(ps, ep), classes(ns, en)};
}

// Closed pp walk of odd length, found by exploring (port, parity) states.
inline bool brute_odd_loop(const Pregraph& g) {
  for (const auto& [start, a] : g.ports()) {
    std::set<std::pair<Id, int>> seen{{start, 0}};
    std::vector<std::pair<Id, int>> stack{{start, 0}};
    while (!stack.empty()) {
      auto [p, parity] = stack.back();
      stack.pop_back();
      for (const auto& [x, y] : g.pp()) {
        for (const auto& [from, to] : {std::pair{x, y}, std::pair{y, x}}) {
          if (from != p) continue;
          std::pair<Id, int> next{to, 1 - parity};
          if (next.first == start && next.second == 1) return true;
          if (seen.insert(next).second) stack.push_back(next);
        }
      }
    }
  }
  return false;
}

// Renames every identifier with a random permutation.
inline Pregraph shuffled_copy(const Pregraph& g, Rng& rng) {
  std::vector<Id> ids;
  for (const auto& [n, a] : g.nodes()) ids.push_back(n);
  for (const auto& [p, a] : g.ports()) ids.push_back(p);
  std::vector<Id> fresh;
  for (std::size_t i = 0; i < ids.size(); ++i) fresh.push_back("x" + std::to_string(i));
  std::shuffle(fresh.begin(), fresh.end(), rng.gen);
  std::map<Id, Id> m;
  for (std::size_t i = 0; i < ids.size(); ++i) m[ids[i]] = fresh[i];
  Pregraph out;
  for (const auto& [n, a] : g.nodes()) out.add_node(m[n], a);
  for (const auto& [p, a] : g.ports()) out.add_port(m[p], a);
  for (const auto& [p, n] : g.pn()) out.add_pn(m[p], m[n]);
  for (const auto& [a, b] : g.pp()) out.add_pp(m[a], m[b]);
  return out;
}

}  // namespace oracle
