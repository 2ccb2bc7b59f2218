#include "portrewrite/examples.hpp"

#include <cctype>
#include <cmath>
#include <tuple>

namespace portrewrite::examples {

namespace {

AttrValue num(double v) { return AttrValue::number(v); }
AttrValue tag(const std::string& t) { return AttrValue::tag(t); }
AttrTerm var(const std::string& n) { return AttrTerm::var(n); }
AttrTerm ctag(const std::string& t) { return AttrTerm::constant(tag(t)); }
AttrTerm cnum(double v) { return AttrTerm::constant(num(v)); }
AttrTerm half_sum(const std::string& a, const std::string& b) {
  return AttrTerm::scale(Rational{1, 2}, AttrTerm::add({var(a), var(b)}));
}

// Node with two ports, as in the triangle hosts.
void corner(Pregraph& g, const Id& node, const std::vector<Id>& ports, std::vector<AttrValue> port_attrs = {}) {
  g.add_node(node);
  for (const auto& p : ports) {
    g.add_port(p, port_attrs);
    g.add_pn(p, node);
  }
}

void triangle_lhs(RuleSide& l, const std::vector<AttrTerm>& a, const std::vector<AttrTerm>& b,
                  const std::vector<AttrTerm>& c) {
  l.add_node("alpha", Part::Env);
  l.add_node("beta", Part::Env);
  l.add_node("gamma", Part::Env);
  for (auto [p, n, attrs] : {std::tuple{"alpha1", "alpha", &a}, {"alpha2", "alpha", &a}, {"beta1", "beta", &b},
                             {"beta2", "beta", &b}, {"gamma1", "gamma", &c}, {"gamma2", "gamma", &c}}) {
    l.add_port(p, Part::Env, *attrs);
    l.add_pn(p, n, Part::Env);
  }
}

EsrRule triangle_rule(const std::string& name, const std::vector<AttrTerm>& a, const std::vector<AttrTerm>& b,
                      const std::vector<AttrTerm>& c) {
  EsrRule r;
  r.name = name;
  triangle_lhs(r.lhs, a, b, c);
  r.lhs.add_pp("alpha2", "beta1", Part::Cut);
  r.lhs.add_pp("beta2", "gamma1", Part::Cut);
  r.lhs.add_pp("gamma2", "alpha1", Part::Cut);

  auto& R = r.rhs;
  for (auto p : {"alpha1", "alpha2", "beta1", "beta2", "gamma1", "gamma2"}) R.add_port(p, Part::Env);
  for (auto [node, prefix] : {std::pair{"U", "u"}, {"V", "v"}, {"W", "w"}}) {
    R.add_node(node, Part::New);
    for (int k = 1; k <= 4; ++k) {
      std::string p = prefix + std::to_string(k);
      R.add_port(p, Part::New);
      R.add_pn(p, node, Part::New);
    }
  }
  for (auto [x, y] : {std::pair{"alpha1", "w2"}, {"alpha2", "u1"}, {"beta1", "u2"}, {"beta2", "v1"}, {"gamma1", "v2"},
                      {"gamma2", "w1"}, {"u3", "w3"}, {"u4", "v4"}, {"w4", "v3"}})
    R.add_pp(x, y, Part::New);
  inherit_env_attrs(r);
  return r;
}

void koch_node(Pregraph& g, const Id& id, Vec2 at) {
  g.add_node(id, {AttrValue::vector(at)});
  g.add_port("p" + id, {tag("-")});
  g.add_port("q" + id, {tag("+")});
  g.add_pn("p" + id, id);
  g.add_pn("q" + id, id);
}

// Port of node `from` on its edge towards `to`.
std::string end_of(const std::string& from, const std::string& to) { return from + "_" + to; }

}  // namespace

Pregraph shared_ports() {
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

GraphWitness triangle_s(bool distinguishing) {
  Pregraph g;
  auto attrs = [&](double v) { return distinguishing ? std::vector{num(v)} : std::vector<AttrValue>{}; };
  corner(g, "E", {"e1", "e2"}, attrs(1));
  corner(g, "B", {"b1", "b2"}, attrs(2));
  corner(g, "C", {"c1", "c2"}, attrs(3));
  g.add_pp("e2", "b1");
  g.add_pp("b2", "c1");
  g.add_pp("c2", "e1");
  return GraphWitness::require(std::move(g));
}

GraphWitness steps_host() {
  Pregraph g;
  corner(g, "E", {"e1", "e2"});
  corner(g, "B", {"b1", "b2", "b3"});
  corner(g, "C", {"c1", "c2", "c3"});
  corner(g, "D", {"d1", "d2"});
  g.add_pp("e2", "b1");
  g.add_pp("b2", "c1");
  g.add_pp("c2", "e1");
  g.add_pp("b3", "d2");
  g.add_pp("d1", "c3");
  return GraphWitness::require(std::move(g));
}

GraphWitness match1_host() {
  Pregraph g;
  corner(g, "E", {"e1", "e2"}, {num(1)});
  corner(g, "B", {"b1", "b2"}, {num(2)});
  corner(g, "C", {"c1", "c2"}, {num(3)});
  g.add_port("c3", {num(1)});
  g.add_port("c4", {num(1)});
  g.add_pn("c3", "C");
  g.add_pn("c4", "C");
  corner(g, "D", {"d1", "d2"}, {num(2)});
  corner(g, "F", {"f1", "f2"}, {num(3)});
  g.add_pp("e2", "b1");
  g.add_pp("b2", "c1");
  g.add_pp("c2", "e1");
  g.add_pp("c4", "d1");
  g.add_pp("d2", "f1");
  g.add_pp("f2", "c3");
  return GraphWitness::require(std::move(g));
}

GraphWitness toy_host() {
  Pregraph g;
  for (auto [n, p] : {std::pair{"A", "a1"}, {"B", "b1"}, {"C", "c1"}, {"D", "d1"}}) corner(g, n, {p});
  g.add_pp("c1", "d1");
  return GraphWitness::require(std::move(g));
}

GraphWitness koch_init() {
  Pregraph g;
  koch_node(g, "1", {-1, 0});
  koch_node(g, "2", {0, std::sqrt(2.0)});
  koch_node(g, "3", {1, 0});
  g.add_pp("p1", "q2");
  g.add_pp("p2", "q3");
  g.add_pp("p3", "q1");
  return GraphWitness::require(std::move(g));
}

std::string cell_id(int i, int j) { return "m_" + std::to_string(i) + "_" + std::to_string(j); }

GraphWitness moore_grid(const GridOptions& o) {
  if (o.rows < 1 || o.cols < 1) throw std::invalid_argument("grid needs at least one row and one column");
  static const char* dirs[] = {"e", "w", "n", "s", "ne", "nw", "se", "sw"};
  auto port = [](const char* d, int i, int j) { return std::string(d) + "_" + std::to_string(i) + "_" + std::to_string(j); };
  Pregraph g;
  for (int i = 0; i < o.rows; ++i)
    for (int j = 0; j < o.cols; ++j) {
      g.add_node(cell_id(i, j), o.fill);
      for (const char* d : dirs) {
        g.add_port(port(d, i, j), {tag(d)});
        g.add_pn(port(d, i, j), cell_id(i, j));
      }
    }
  // Each cell owns the links towards e, s, ne and se.
  struct Step {
    const char* from;
    const char* to;
    int di, dj;
  };
  static const Step steps[] = {{"e", "w", 0, 1}, {"s", "n", 1, 0}, {"ne", "sw", -1, 1}, {"se", "nw", 1, 1}};
  for (int i = 0; i < o.rows; ++i)
    for (int j = 0; j < o.cols; ++j)
      for (const auto& s : steps) {
        int ti = i + s.di, tj = j + s.dj;
        if (o.torus) {
          ti = (ti + o.rows) % o.rows;
          tj = (tj + o.cols) % o.cols;
        } else if (ti < 0 || ti >= o.rows || tj < 0 || tj >= o.cols) {
          continue;
        }
        g.add_pp(port(s.from, i, j), port(s.to, ti, tj));
      }
  return GraphWitness::require(std::move(g));
}

GraphWitness set_cell(const GraphWitness& g, int i, int j, std::vector<AttrValue> values) {
  Pregraph copy = g.graph();
  copy.set_attrs(cell_id(i, j), std::move(values));
  return GraphWitness::require(std::move(copy));
}

namespace {

GraphWitness gol_window(const std::vector<std::vector<std::vector<double>>>& window) {
  GridOptions o;
  o.rows = o.cols = 8;
  auto g = moore_grid(o);
  for (std::size_t i = 0; i < window.size(); ++i)
    for (std::size_t j = 0; j < window[i].size(); ++j) {
      std::vector<AttrValue> values;
      for (double v : window[i][j]) values.push_back(num(v));
      g = set_cell(g, kGolWindow + static_cast<int>(i), kGolWindow + static_cast<int>(j), values);
    }
  return g;
}

}  // namespace

GraphWitness gol_block() {
  return gol_window({{{0}, {0}, {0}, {0}}, {{0}, {1}, {1}, {0}}, {{0}, {0, 1}, {1}, {0}}, {{0}, {0}, {0}, {0}}});
}

GraphWitness gol_grid2() {
  return gol_window({{{0}, {0}, {0}, {0}}, {{0}, {1}, {0}, {0}}, {{0}, {0, 1}, {1}, {0}}, {{0}, {0}, {0}, {0}}});
}

GraphWitness mesh_init() {
  Pregraph g;
  g.add_node("O", {AttrValue::vector(0, 0)});
  const double pi = std::acos(-1.0);
  for (int k = 0; k < 6; ++k)
    g.add_node("P" + std::to_string(k), {AttrValue::vector(std::cos(pi * k / 3), std::sin(pi * k / 3))});
  auto edge = [&](const std::string& a, const std::string& b, bool marked) {
    for (auto [x, y] : {std::pair{a, b}, {b, a}}) {
      g.add_port(end_of(x, y), {tag(marked ? "r" : "k")});
      g.add_pn(end_of(x, y), x);
    }
    g.add_pp(end_of(a, b), end_of(b, a));
  };
  // Triangles O, Pk, Pk+1 end up with 3, 2, 1, 1, 1 and 2 marked edges.
  const bool spoke[] = {true, true, true, false, false, false};
  const bool rim[] = {true, false, false, true, true, true};
  for (int k = 0; k < 6; ++k) {
    std::string p = "P" + std::to_string(k), q = "P" + std::to_string((k + 1) % 6);
    edge("O", p, spoke[k]);
    edge(p, q, rim[k]);
  }
  return GraphWitness::require(std::move(g));
}

EsrRule rt() { return triangle_rule("R_T", {}, {}, {}); }

EsrRule rt_distinguishing() {
  return triangle_rule("R_T_dist", {cnum(1)}, {cnum(2)}, {cnum(3)});
}

EsrRule rt_asymmetric() {
  auto r = triangle_rule("R_T_asym", {}, {}, {});
  r.rhs.add_attr("U", cnum(1), Part::New);
  return r;
}

EsrRule koch_rule() {
  EsrRule r;
  r.name = "koch";
  auto& L = r.lhs;
  L.add_node("a", Part::Env, {var("a")});
  L.add_node("b", Part::Env, {var("b")});
  L.add_port("pa", Part::Env, {ctag("-")});
  L.add_port("qb", Part::Env, {ctag("+")});
  L.add_pn("pa", "a", Part::Env);
  L.add_pn("qb", "b", Part::Env);
  L.add_pp("pa", "qb", Part::Cut);

  auto& R = r.rhs;
  R.add_port("pa", Part::Env);
  R.add_port("qb", Part::Env);
  auto third = [](int wa, int wb) {
    return AttrTerm::add({AttrTerm::scale(Rational{wa, 3}, var("a")), AttrTerm::scale(Rational{wb, 3}, var("b"))});
  };
  // j = (a + b)/2 + sqrt(3)/6 (perp(b) - perp(a)), perp(x, y) = (-y, x)
  auto apex = AttrTerm::add({half_sum("a", "b"),
                             AttrTerm::mul({AttrTerm::div(AttrTerm::sqrt(3), cnum(6)),
                                            AttrTerm::sub(AttrTerm::perp(var("b")), AttrTerm::perp(var("a")))})});
  for (auto [n, t] : {std::pair{"i", third(2, 1)}, {"j", apex}, {"k", third(1, 2)}}) {
    R.add_node(n, Part::New, {t});
    R.add_port(std::string("p") + n, Part::New, {ctag("-")});
    R.add_port(std::string("q") + n, Part::New, {ctag("+")});
    R.add_pn(std::string("p") + n, n, Part::New);
    R.add_pn(std::string("q") + n, n, Part::New);
  }
  R.add_pp("pa", "qi", Part::New);
  R.add_pp("pi", "qj", Part::New);
  R.add_pp("pj", "qk", Part::New);
  R.add_pp("pk", "qb", Part::New);
  inherit_env_attrs(r);
  return r;
}

EsrRule gol_rule() {
  EsrRule r;
  r.name = "life";
  auto& L = r.lhs;
  L.add_node("i", Part::Env, {var("x_i")}, Part::Cut);
  std::vector<AttrTerm> ys;
  const std::string neighbors = "abcdefgh";
  for (std::size_t k = 0; k < neighbors.size(); ++k) {
    std::string q(1, neighbors[k]);
    std::string ip = "i" + std::to_string(k + 1), qp = q + "1";
    L.add_node(q, Part::Env, {var("y_" + q)});
    L.add_port(ip, Part::Env);
    L.add_port(qp, Part::Env);
    L.add_pn(ip, "i", Part::Env);
    L.add_pn(qp, q, Part::Env);
    L.add_pp(ip, qp, Part::Env);
    ys.push_back(var("y_" + q));
  }
  auto sum = AttrTerm::add(ys);
  auto next = AttrTerm::add({AttrTerm::eq(sum, cnum(3)),
                             AttrTerm::mul({AttrTerm::eq(var("x_i"), cnum(1)), AttrTerm::eq(sum, cnum(2))})});
  r.rhs.add_node("i", Part::Env);
  r.rhs.add_attr("i", next, Part::New);
  return r;
}

namespace {

// Triangle A, B, C with one port per edge end. Marked edges are cut, the
// others stay as environment.
RuleSide mesh_lhs(bool ab, bool bc, bool ca) {
  RuleSide L;
  for (auto [n, x] : {std::pair{"A", "a"}, {"B", "b"}, {"C", "c"}}) L.add_node(n, Part::Env, {var(x)});
  auto edge = [&](const std::string& x, const std::string& y, bool marked) {
    for (auto [u, v] : {std::pair{x, y}, {y, x}}) {
      L.add_port(end_of(u, v), Part::Env, {ctag(marked ? "r" : "k")});
      L.add_pn(end_of(u, v), u, Part::Env);
    }
    L.add_pp(end_of(x, y), end_of(y, x), marked ? Part::Cut : Part::Env);
  };
  edge("A", "B", ab);
  edge("B", "C", bc);
  edge("C", "A", ca);
  return L;
}

std::string lower(const std::string& corner) { return std::string(1, static_cast<char>(std::tolower(corner[0]))); }

struct MeshBuilder {
  RuleSide& R;
  void node(const std::string& id, AttrTerm at) { R.add_node(id, Part::New, {std::move(at)}); }
  void port(const std::string& owner, const std::string& id) {
    R.add_port(id, Part::New, {ctag("r")});
    R.add_pn(id, owner, Part::New);
  }
  void link(const std::string& a, const std::string& b) { R.add_pp(a, b, Part::New); }
  void env_port(const std::string& id) { R.add_port(id, Part::Env); }
  void env_node(const std::string& id) { R.add_node(id, Part::Env); }
  // Midpoint of a marked edge x-y, reconnected to both ends.
  void midpoint(const std::string& x, const std::string& y) {
    std::string m = "M" + x + y;
    node(m, half_sum(lower(x), lower(y)));
    env_port(end_of(x, y));
    env_port(end_of(y, x));
    port(m, end_of(m, x));
    port(m, end_of(m, y));
    link(end_of(x, y), end_of(m, x));
    link(end_of(y, x), end_of(m, y));
  }
  void edge(const std::string& a, const std::string& b) {
    port(a, end_of(a, b));
    port(b, end_of(b, a));
    link(end_of(a, b), end_of(b, a));
  }
};

}  // namespace

EsrRule mesh_red() {
  EsrRule r{"R'_T", mesh_lhs(true, true, true), {}};
  MeshBuilder b{r.rhs};
  b.midpoint("A", "B");
  b.midpoint("B", "C");
  b.midpoint("C", "A");
  b.edge("MAB", "MBC");
  b.edge("MBC", "MCA");
  b.edge("MCA", "MAB");
  inherit_env_attrs(r);
  return r;
}

EsrRule mesh_green() {
  EsrRule r{"R_U", mesh_lhs(true, false, false), {}};
  MeshBuilder b{r.rhs};
  b.midpoint("A", "B");
  b.env_node("C");
  b.edge("MAB", "C");
  inherit_env_attrs(r);
  return r;
}

EsrRule mesh_double() {
  EsrRule r{"R_V", mesh_lhs(true, false, true), {}};
  MeshBuilder b{r.rhs};
  b.midpoint("A", "B");
  b.midpoint("C", "A");
  b.env_node("B");
  b.env_node("C");
  // Q is the centroid of the quadrilateral MAB, B, C, MCA.
  b.node("Q", AttrTerm::add({AttrTerm::scale(Rational{1, 4}, var("a")),
                             AttrTerm::scale(Rational{3, 8}, AttrTerm::add({var("b"), var("c")}))}));
  b.edge("MAB", "MCA");
  b.edge("MAB", "Q");
  b.edge("MCA", "Q");
  b.edge("B", "Q");
  b.edge("C", "Q");
  inherit_env_attrs(r);
  return r;
}

EsrRule match1_rule() {
  EsrRule r;
  r.name = "match1";
  triangle_lhs(r.lhs, {cnum(1)}, {cnum(2)}, {cnum(3)});
  r.lhs.add_pp("alpha2", "beta1", Part::Env);
  r.lhs.add_pp("beta2", "gamma1", Part::Env);
  r.lhs.add_pp("gamma2", "alpha1", Part::Env);
  return r;
}

EsrRule toy_rule() {
  EsrRule r;
  r.name = "toy";
  for (auto [n, p] : {std::pair{"alpha", "alpha1"}, {"beta", "beta1"}}) {
    r.lhs.add_node(n, Part::Env);
    r.lhs.add_port(p, Part::Env);
    r.lhs.add_pn(p, n, Part::Env);
    r.rhs.add_port(p, Part::Env);
  }
  r.rhs.add_pp("alpha1", "beta1", Part::New);
  return r;
}

EsrRule incompatible_a() {
  EsrRule r;
  r.name = "A";
  r.lhs.add_node("x", Part::Env);
  r.rhs.add_node("x", Part::Env);
  r.rhs.add_port("x1", Part::New);
  r.rhs.add_pn("x1", "x", Part::New);
  return r;
}

EsrRule incompatible_b() {
  EsrRule r;
  r.name = "B";
  r.lhs.add_node("z", Part::Cut);
  return r;
}

std::vector<std::string> rule_set_names() {
  return {"rt", "rt-dist", "rt-asym", "koch", "life", "mesh", "match1", "toy", "incompatible"};
}

std::optional<std::vector<EsrRule>> rule_set(const std::string& name) {
  if (name == "rt") return std::vector{rt()};
  if (name == "rt-dist") return std::vector{rt_distinguishing()};
  if (name == "rt-asym") return std::vector{rt_asymmetric()};
  if (name == "koch") return std::vector{koch_rule()};
  if (name == "life") return std::vector{gol_rule()};
  if (name == "mesh") return std::vector{mesh_red(), mesh_green(), mesh_double()};
  if (name == "match1") return std::vector{match1_rule()};
  if (name == "toy") return std::vector{toy_rule()};
  if (name == "incompatible") return std::vector{incompatible_a(), incompatible_b()};
  return std::nullopt;
}

std::vector<std::string> graph_names() {
  return {"shared-ports", "triangle-s", "triangle-s-dist", "steps", "match1", "toy", "koch", "mesh", "block", "grid2"};
}

std::optional<Pregraph> graph(const std::string& name) {
  if (name == "shared-ports") return shared_ports();
  if (name == "triangle-s") return triangle_s().graph();
  if (name == "triangle-s-dist") return triangle_s(true).graph();
  if (name == "steps") return steps_host().graph();
  if (name == "match1") return match1_host().graph();
  if (name == "toy") return toy_host().graph();
  if (name == "koch") return koch_init().graph();
  if (name == "mesh") return mesh_init().graph();
  if (name == "block") return gol_block().graph();
  if (name == "grid2") return gol_grid2().graph();
  return std::nullopt;
}

}  // namespace portrewrite::examples
