#include <doctest.h>

#include <cctype>
#include <cmath>
#include <regex>

#include "portrewrite/examples.hpp"
#include "portrewrite/io.hpp"
#include "rule_oracles.hpp"

using namespace portrewrite;
namespace ex = portrewrite::examples;
using oracle::Rng;

namespace {

bool same_side(const RuleSide& a, const RuleSide& b) {
  return a.graph == b.graph && a.parts == b.parts && a.pn_parts == b.pn_parts && a.pp_parts == b.pp_parts &&
         a.attr_parts == b.attr_parts;
}

bool same_rule(const EsrRule& a, const EsrRule& b) {
  return a.name == b.name && same_side(a.lhs, b.lhs) && same_side(a.rhs, b.rhs);
}

std::string parse_error_path(const std::string& text, bool rule = false) {
  try {
    auto j = io::parse_text(text);
    if (rule)
      io::rule_from_json(j);
    else
      io::graph_from_json(j);
  } catch (const io::ParseError& e) {
    return e.path();
  }
  return "<accepted>";
}

// Recursive-descent recognizer for the DOT language (undirected graphs):
//   graph    : 'strict'? 'graph' ID? '{' stmt_list '}'
//   stmt     : ID '=' ID | attr_stmt | edge_stmt | node_stmt | subgraph
//   node_id  : ID (':' ID (':' ID)?)?
// Record labels are checked separately: balanced braces and, for every
// edge endpoint "node":field, a field <field> in that node's label.
class DotChecker {
 public:
  explicit DotChecker(std::string text) : s_(std::move(text)) {}

  bool accept() {
    try {
      graph();
      skip();
      if (pos_ != s_.size()) fail("trailing input");
      for (const auto& [node, field] : endpoints_) {
        auto it = labels_.find(node);
        if (field.empty()) {
          if (!declared_.count(node)) fail("undeclared node " + node);
          continue;
        }
        if (it == labels_.end()) fail("no record label for " + node);
        if (!record_fields(it->second).count(field)) fail("no field " + field + " in " + node);
      }
      return true;
    } catch (const std::runtime_error& e) {
      error = e.what();
      return false;
    }
  }

  std::string error;
  std::size_t edges = 0;
  std::set<std::string> declared_;

 private:
  [[noreturn]] void fail(const std::string& what) {
    throw std::runtime_error(what + " at " + std::to_string(pos_));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool peek(const std::string& tok) {
    skip();
    return s_.compare(pos_, tok.size(), tok) == 0;
  }

  void expect(const std::string& tok) {
    if (!peek(tok)) fail("expected '" + tok + "'");
    pos_ += tok.size();
  }

  bool keyword(const std::string& kw) {
    skip();
    if (s_.compare(pos_, kw.size(), kw) != 0) return false;
    std::size_t end = pos_ + kw.size();
    if (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_')) return false;
    pos_ = end;
    return true;
  }

  bool at_id() {
    skip();
    if (pos_ >= s_.size()) return false;
    char c = s_[pos_];
    return c == '"' || c == '_' || c == '-' || c == '.' || std::isalnum(static_cast<unsigned char>(c));
  }

  std::string id() {
    skip();
    if (pos_ >= s_.size()) fail("expected an identifier");
    if (s_[pos_] == '"') {
      std::string out;
      ++pos_;
      while (true) {
        if (pos_ >= s_.size()) fail("unterminated string");
        char c = s_[pos_++];
        if (c == '"') break;
        // Only a backslash directly before a quote is an escape.
        if (c == '\\' && pos_ < s_.size() && s_[pos_] == '"') {
          out += s_[pos_++];
          continue;
        }
        out += c;
      }
      return out;
    }
    std::size_t start = pos_;
    if (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_') {
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    } else {
      if (s_[pos_] == '-') ++pos_;
      while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
    }
    if (pos_ == start) fail("expected an identifier");
    return s_.substr(start, pos_ - start);
  }

  void graph() {
    keyword("strict");
    if (!keyword("graph")) fail("expected 'graph'");
    if (!peek("{")) id();
    expect("{");
    stmt_list();
    expect("}");
  }

  void stmt_list() {
    while (!peek("}")) {
      stmt();
      if (peek(";")) expect(";");
    }
  }

  std::map<std::string, std::string> attr_list() {
    std::map<std::string, std::string> out;
    while (peek("[")) {
      expect("[");
      while (!peek("]")) {
        auto k = id();
        expect("=");
        out[k] = id();
        if (peek(",")) expect(",");
        if (peek(";")) expect(";");
      }
      expect("]");
    }
    return out;
  }

  std::pair<std::string, std::string> node_id() {
    auto n = id();
    std::string field;
    if (peek(":")) {
      expect(":");
      field = id();
      if (peek(":")) {
        expect(":");
        id();
      }
    }
    return {n, field};
  }

  void stmt() {
    if (keyword("node") || keyword("edge") || keyword("graph")) {
      attr_list();
      return;
    }
    if (keyword("subgraph")) {
      if (!peek("{")) id();
      expect("{");
      stmt_list();
      expect("}");
      return;
    }
    if (!at_id()) fail("expected a statement");
    auto first = node_id();
    if (peek("=")) {
      expect("=");
      id();
      return;
    }
    if (peek("--")) {
      std::vector<std::pair<std::string, std::string>> chain{first};
      while (peek("--")) {
        expect("--");
        chain.push_back(node_id());
      }
      attr_list();
      for (auto& e : chain) endpoints_.push_back(e);
      edges += chain.size() - 1;
      return;
    }
    if (peek("->")) fail("directed edge in an undirected graph");
    auto attrs = attr_list();
    declared_.insert(first.first);
    if (attrs.count("label")) labels_[first.first] = attrs["label"];
  }

  // Field names of a record label; throws on unbalanced braces or ports.
  std::set<std::string> record_fields(const std::string& label) {
    std::set<std::string> out;
    int depth = 0;
    for (std::size_t i = 0; i < label.size(); ++i) {
      char c = label[i];
      if (c == '\\') {
        ++i;
        continue;
      }
      if (c == '{') ++depth;
      if (c == '}' && --depth < 0) fail("unbalanced record label");
      if (c == '<') {
        auto close = label.find('>', i);
        if (close == std::string::npos) fail("unterminated record port");
        out.insert(label.substr(i + 1, close - i - 1));
        i = close;
      }
    }
    if (depth != 0) fail("unbalanced record label");
    return out;
  }

  std::string s_;
  std::size_t pos_ = 0;
  std::map<std::string, std::string> labels_;
  std::vector<std::pair<std::string, std::string>> endpoints_;
};

struct Segment {
  Vec2 a, b;
};

std::vector<Segment> svg_segments(const std::string& svg) {
  static const std::regex line(R"re(<line x1="([^"]+)" y1="([^"]+)" x2="([^"]+)" y2="([^"]+)")re");
  std::vector<Segment> out;
  for (std::sregex_iterator it(svg.begin(), svg.end(), line), end; it != end; ++it)
    out.push_back({{std::stod((*it)[1]), std::stod((*it)[2])}, {std::stod((*it)[3]), std::stod((*it)[4])}});
  return out;
}

bool near(Vec2 p, Vec2 q) { return std::abs(p.x - q.x) < 1e-9 && std::abs(p.y - q.y) < 1e-9; }

bool same_segments(std::vector<Segment> got, const std::vector<Segment>& want) {
  if (got.size() != want.size()) return false;
  for (const auto& w : want) {
    auto it = std::find_if(got.begin(), got.end(), [&](const Segment& g) {
      return (near(g.a, w.a) && near(g.b, w.b)) || (near(g.a, w.b) && near(g.b, w.a));
    });
    if (it == got.end()) return false;
    got.erase(it);
  }
  return true;
}

RuleSystem verified(std::vector<EsrRule> rules) {
  RuleSystem rs(std::move(rules));
  rs.verify_symmetry();
  rs.verify_conflict_freedom();
  return rs;
}

}  // namespace

TEST_CASE("values and terms round-trip") {
  for (const auto& v : {oracle::num(0.1), oracle::num(-3), oracle::tag("+"), AttrValue::vector(-1, std::sqrt(2.0))})
    CHECK(io::value_from_json(io::value_to_json(v)) == v);
  auto koch = ex::koch_rule();
  for (const auto& side : {koch.lhs, koch.rhs})
    for (const auto& [id, terms] : side.graph.nodes())
      for (const auto& t : terms) CHECK(io::term_from_json(io::term_to_json(t)) == t);
  auto t = io::term_from_json(io::parse_text(
      R"(["add", ["scale", "2/3", ["var", "a"]], ["scale", "1/3", ["var", "b"]]])"));
  Substitution s{{"a", AttrValue::vector(-1, 0)}, {"b", AttrValue::vector(1, 0)}};
  auto v = evaluate(t, s).as_vector();
  CHECK(v.x == doctest::Approx(-1.0 / 3));
  CHECK(v.y == doctest::Approx(0));
  CHECK(io::term_from_json(io::parse_text(R"(["perp", [1, 2]])")) ==
        AttrTerm::perp(AttrTerm::constant(AttrValue::vector(1, 2))));
}

TEST_CASE("malformed terms are located") {
  auto path = [](const std::string& text) {
    try {
      io::term_from_json(io::parse_text(text), "$.t");
    } catch (const io::ParseError& e) {
      return e.path();
    }
    return std::string("<accepted>");
  };
  CHECK(path(R"(["frobnicate", 1])") == "$.t[0]");
  CHECK(path(R"(["sub", 1])") == "$.t");
  CHECK(path(R"(["add", 1, ["var"]])") == "$.t[2]");
  CHECK(path(R"(["scale", "1/0", 1])") == "$.t[1]");
  CHECK(path(R"(["sqrt", -2])") == "$.t[1]");
  CHECK(path("null") == "$.t");
}

TEST_CASE("graph documents round-trip byte-stably") {
  Rng rng(11);
  auto pool = oracle::rule_pool();
  pool.push_back(AttrValue::vector(0.5, -2.25));
  for (int round = 0; round < 200; ++round) {
    auto g = round % 2 ? oracle::random_pregraph(rng, 8) : oracle::random_graph(rng, 10, pool);
    auto text = io::emit(io::graph_to_json(g));
    auto back = io::graph_from_json(io::parse_text(text));
    REQUIRE(back == g);
    CHECK(io::emit(io::graph_to_json(back)) == text);
  }
  for (const auto& name : ex::graph_names()) {
    auto g = *ex::graph(name);
    CHECK(io::graph_from_json(io::graph_to_json(g)) == g);
  }
}

TEST_CASE("emit normalizes an equivalent document") {
  auto text = R"({"pp": [["b1", "a1"]], "pn": [["b1", "b"], ["a1", "a"]],
                  "ports": [{"id": "b1"}, {"id": "a1", "attrs": [2, 1, 1]}],
                  "nodes": [{"id": "b", "attrs": []}, {"id": "a"}]})";
  auto g = io::graph_from_json(io::parse_text(text));
  auto normal = io::emit(io::graph_to_json(g));
  CHECK(io::emit(io::graph_to_json(io::graph_from_json(io::parse_text(normal)))) == normal);
  CHECK(g.attrs("a1").size() == 2);
  CHECK(g.has_pp("a1", "b1"));
  CHECK(normal.back() == '\n');
  CHECK(normal.find("\"attrs\": []") != std::string::npos);
}

TEST_CASE("graph parse errors carry a path") {
  CHECK(parse_error_path(R"({"nodes": [{"id": "a", "colour": 1}]})") == "$.nodes[0].colour");
  CHECK(parse_error_path(R"({"nodes": [], "edges": []})") == "$.edges");
  CHECK(parse_error_path(R"({"nodes": [{"id": "a"}, {"id": "a"}]})") == "$.nodes[1].id");
  CHECK(parse_error_path(R"({"nodes": [{"id": "a"}], "ports": [{"id": "a"}]})") == "$.ports[0].id");
  CHECK(parse_error_path(R"({"nodes": [{"id": "a"}], "pn": [["p", "a"]]})") == "$.pn[0]");
  CHECK(parse_error_path(R"({"ports": [{"id": "p"}], "pp": [["p"]]})") == "$.pp[0]");
  CHECK(parse_error_path(R"({"nodes": [{"id": "a", "attrs": [[1, "x"]]}]})") == "$.nodes[0].attrs[0][1]");
  CHECK(parse_error_path(R"({"nodes": [{"attrs": []}]})") == "$.nodes[0].id");
  CHECK(parse_error_path(R"([])") == "$");
}

TEST_CASE("truncated JSON reports the byte offset") {
  auto text = io::emit(io::graph_to_json(ex::shared_ports()));
  for (std::size_t cut : {std::size_t{0}, std::size_t{1}, text.size() / 2, text.size() - 3}) {
    auto path = parse_error_path(text.substr(0, cut));
    CHECK(path.rfind("byte ", 0) == 0);
  }
}

TEST_CASE("shared-port pregraph document") {
  auto j = io::parse_text(R"({
    "nodes": [{"id": "n1", "attrs": [1]}, {"id": "n2", "attrs": [1]}, {"id": "n3", "attrs": [2]},
              {"id": "n4", "attrs": [1]}, {"id": "n5", "attrs": [1]}],
    "ports": [{"id": "p1"}, {"id": "p2"}, {"id": "p3"}],
    "pn": [["p1", "n1"], ["p1", "n2"], ["p2", "n5"], ["p3", "n3"], ["p3", "n4"]],
    "pp": [["p1", "p2"], ["p2", "p3"]]})");
  auto g = io::graph_from_json(j);
  CHECK(g == oracle::shared_ports());
  CHECK(g == ex::shared_ports());
  std::set<Id> multi_node;
  for (const auto& v : graph_violations(g))
    if (v.kind == GraphViolation::Kind::MultipleNodes) multi_node.insert(v.port);
  CHECK(multi_node == std::set<Id>{"p1", "p3"});
}

TEST_CASE("rule documents round-trip") {
  for (const auto& name : ex::rule_set_names()) {
    auto set = *ex::rule_set(name);
    for (const auto& r : set) {
      auto text = io::emit(io::rule_to_json(r));
      auto back = io::rule_from_json(io::parse_text(text));
      CHECK_MESSAGE(same_rule(back, r), r.name);
      CHECK(io::emit(io::rule_to_json(back)) == text);
      CHECK(validate_rule(back).empty());
    }
  }
  Rng rng(5);
  for (int round = 0; round < 200; ++round) {
    auto r = oracle::random_rule(rng, "r" + std::to_string(round));
    auto back = io::rule_from_json(io::rule_to_json(r));
    REQUIRE(same_rule(back, r));
  }
  auto set = *ex::rule_set("mesh");
  auto parsed = io::rules_from_json(io::rules_to_json(set));
  REQUIRE(parsed.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(same_rule(parsed[i], set[i]));
}

TEST_CASE("R_T document parses and validates") {
  auto r = io::rule_from_json(io::parse_text(R"({
    "name": "R_T",
    "lhs": {
      "nodes": [{"id": "alpha", "part": "env"}, {"id": "beta", "part": "env"}, {"id": "gamma", "part": "env"}],
      "ports": [{"id": "a1", "part": "env"}, {"id": "a2", "part": "env"}, {"id": "b1", "part": "env"},
                {"id": "b2", "part": "env"}, {"id": "c1", "part": "env"}, {"id": "c2", "part": "env"}],
      "pn": [["a1", "alpha"], ["a2", "alpha"], ["b1", "beta"], ["b2", "beta"], ["c1", "gamma"], ["c2", "gamma"]],
      "pp": [["a2", "b1", "cut"], ["b2", "c1", "cut"], ["c2", "a1", "cut"]]
    },
    "rhs": {
      "nodes": [{"id": "U", "part": "new"}, {"id": "V", "part": "new"}, {"id": "W", "part": "new"}],
      "ports": [{"id": "a1", "part": "env"}, {"id": "a2", "part": "env"}, {"id": "b1", "part": "env"},
                {"id": "b2", "part": "env"}, {"id": "c1", "part": "env"}, {"id": "c2", "part": "env"},
                {"id": "u1", "part": "new"}, {"id": "u2", "part": "new"}, {"id": "u3", "part": "new"},
                {"id": "u4", "part": "new"}, {"id": "v1", "part": "new"}, {"id": "v2", "part": "new"},
                {"id": "v3", "part": "new"}, {"id": "v4", "part": "new"}, {"id": "w1", "part": "new"},
                {"id": "w2", "part": "new"}, {"id": "w3", "part": "new"}, {"id": "w4", "part": "new"}],
      "pn": [["u1", "U"], ["u2", "U"], ["u3", "U"], ["u4", "U"], ["v1", "V"], ["v2", "V"], ["v3", "V"],
             ["v4", "V"], ["w1", "W"], ["w2", "W"], ["w3", "W"], ["w4", "W"]],
      "pp": [["a2", "u1"], ["b1", "u2"], ["b2", "v1"], ["c1", "v2"], ["c2", "w1"], ["a1", "w2"],
             ["u3", "v4"], ["v3", "w4"], ["w3", "u4"]]
    }})"));
  CHECK(validate_rule(r).empty());
  CHECK(r.lhs.pn_part("a1", "alpha") == Part::Env);
  CHECK(r.rhs.pp_part("u3", "v4") == Part::New);
  CHECK(enumerate_matches(r, ex::triangle_s()).size() == 6);
}

TEST_CASE("rule parse errors carry a path") {
  auto base = [](const std::string& lhs_node) {
    return R"({"name": "r", "lhs": {"nodes": [)" + lhs_node + R"(]}, "rhs": {}})";
  };
  CHECK(parse_error_path(base(R"({"id": "a", "part": "new"})"), true) == "$.lhs.nodes[0].part");
  CHECK(parse_error_path(base(R"({"id": "a", "part": "bogus"})"), true) == "$.lhs.nodes[0].part");
  CHECK(parse_error_path(base(R"({"id": "a"})"), true) == "$.lhs.nodes[0].part");
  CHECK(parse_error_path(base(R"({"id": "a", "part": "env", "attrs": [["var"]]})"), true) ==
        "$.lhs.nodes[0].attrs[0]");
  CHECK(parse_error_path(base(R"({"id": "a", "part": "env", "attrs": [{"term": 1, "part": "new"}]})"), true) ==
        "$.lhs.nodes[0].attrs[0].part");
  CHECK(parse_error_path(R"({"name": "r", "lhs": {}, "rhs": {}, "extra": 1})", true) == "$.extra");
  CHECK(parse_error_path(R"({"name": "r", "lhs": {}})", true) == "$.rhs");
  CHECK(parse_error_path(R"({"name": "r", "lhs": {}, "rhs": {"nodes": [{"id": "x", "part": "cut"}]}})", true) ==
        "$.rhs.nodes[0].part");
  auto rules = io::parse_text(R"({"rules": [{"name": "r", "lhs": {}, "rhs": {}}, {"name": "r", "lhs": {}, "rhs": {}}]})");
  CHECK_THROWS_AS(io::rules_from_json(rules), io::ParseError);
}

TEST_CASE("pair parts default from their endpoints") {
  auto r = io::rule_from_json(io::parse_text(R"({
    "name": "r",
    "lhs": {"nodes": [{"id": "a", "part": "cut"}, {"id": "b", "part": "env"}],
            "ports": [{"id": "p", "part": "env"}, {"id": "q", "part": "env"}],
            "pn": [["p", "a"], ["q", "b"]], "pp": [["p", "q"]]},
    "rhs": {"nodes": [{"id": "b", "part": "env"}, {"id": "c", "part": "new"}],
            "ports": [{"id": "q", "part": "env"}],
            "pn": [["q", "b"]]}})"));
  CHECK(r.lhs.pn_part("p", "a") == Part::Cut);
  CHECK(r.lhs.pn_part("q", "b") == Part::Env);
  CHECK(r.lhs.pp_part("p", "q") == Part::Env);
  CHECK(r.rhs.pn_part("q", "b") == Part::Env);
}

TEST_CASE("rhs env elements inherit their attributes") {
  auto r = io::rule_from_json(io::parse_text(R"({
    "name": "r",
    "lhs": {"nodes": [{"id": "a", "part": "env", "attrs": [["var", "x"]]}]},
    "rhs": {"nodes": [{"id": "a", "part": "env"}]}})"));
  CHECK(r.rhs.graph.attrs("a") == r.lhs.graph.attrs("a"));
  CHECK(validate_rule(r).empty());
}

TEST_CASE("invalid rules parse and are rejected by validation") {
  auto r = io::rule_from_json(io::parse_text(R"({
    "name": "r",
    "lhs": {"nodes": [{"id": "a", "part": "cut"}]},
    "rhs": {"nodes": [{"id": "a", "part": "env"}]}})"));
  CHECK_FALSE(validate_rule(r).empty());
}

TEST_CASE("matches round-trip") {
  std::vector<EsrRule> rules{ex::rt(), ex::match1_rule()};
  auto ms = enumerate_matches(ex::rt(), ex::triangle_s());
  auto more = enumerate_matches(ex::match1_rule(), ex::match1_host());
  ms.insert(ms.end(), more.begin(), more.end());
  assign_tags(ms, 4);
  auto text = io::emit(io::matches_to_json(ms));
  auto back = io::matches_from_json(io::parse_text(text), rules);
  REQUIRE(back.size() == ms.size());
  for (std::size_t i = 0; i < ms.size(); ++i) {
    CHECK(back[i].rule_name() == ms[i].rule_name());
    CHECK(back[i].tag == ms[i].tag);
    CHECK(back[i].nodes == ms[i].nodes);
    CHECK(back[i].ports == ms[i].ports);
    CHECK(back[i].subst == ms[i].subst);
    if (ms[i].rule_name() == "R_T") CHECK_FALSE(check_match(back[i], ex::triangle_s().graph()).has_value());
  }
  CHECK(io::emit(io::matches_to_json(back)) == text);

  auto j = io::match_to_json(ms.front());
  j["nodes"].erase("alpha");
  CHECK_THROWS_AS(io::match_from_json(j, rules), io::ParseError);
  j = io::match_to_json(ms.front());
  j["rule"] = "nope";
  try {
    io::match_from_json(j, rules);
    FAIL("accepted an unknown rule");
  } catch (const io::ParseError& e) {
    CHECK(e.path() == "$.rule");
  }
}

TEST_CASE("step and report documents round-trip") {
  auto rs = verified({ex::rt()});
  auto step = full_parallel_step(rs, ex::triangle_s());
  auto text = io::emit(io::step_to_json(step));
  auto back = io::step_from_json(io::parse_text(text), rs.rules());
  CHECK(back.result == step.result);
  CHECK(back.intermediate == step.intermediate);
  CHECK(back.quotient_map.node_class == step.quotient_map.node_class);
  CHECK(back.quotient_map.port_class == step.quotient_map.port_class);
  CHECK(back.quotient_map.node_classes == step.quotient_map.node_classes);
  CHECK(back.is_graph == step.is_graph);
  CHECK(back.matches_used.size() == 6);
  CHECK(io::emit(io::step_to_json(back)) == text);

  auto toy = verified({ex::toy_rule()});
  auto non_graph = full_parallel_step(toy, ex::toy_host());
  REQUIRE_FALSE(non_graph.is_graph);
  auto back2 = io::step_from_json(io::step_to_json(non_graph), toy.rules());
  REQUIRE(back2.violations.size() == non_graph.violations.size());
  CHECK(back2.violations.front().port == non_graph.violations.front().port);
  CHECK(back2.violations.front().kind == non_graph.violations.front().kind);
  CHECK(back2.violations.front().offending == non_graph.violations.front().offending);

  auto koch = verified({ex::koch_rule()});
  RunOptions o;
  o.max_steps = 2;
  auto report = run(koch, ex::koch_init(), o);
  auto rtext = io::emit(io::report_to_json(report));
  auto rback = io::report_from_json(io::parse_text(rtext), koch.rules());
  CHECK(rback.final_graph() == report.final_graph());
  CHECK(rback.stop == report.stop);
  CHECK(rback.fixpoint_step == report.fixpoint_step);
  CHECK(io::emit(io::report_to_json(rback)) == rtext);
  CHECK(rtext.find("timings_ms") == std::string::npos);
  auto timed = io::report_to_json(report, {.timings = true, .intermediate = false});
  CHECK(timed["timings_ms"].size() == 2);
  CHECK_FALSE(timed["steps"][0].contains("intermediate"));
}

TEST_CASE("DOT export follows the grammar") {
  Rng rng(21);
  std::vector<Pregraph> graphs;
  for (const auto& name : ex::graph_names()) graphs.push_back(*ex::graph(name));
  for (int i = 0; i < 150; ++i) graphs.push_back(oracle::random_pregraph(rng, 8));
  Pregraph odd;
  odd.add_node("a \"quoted\" {x|y} <z>", {oracle::tag("t\\ag"), AttrValue::vector(1, 2)});
  odd.add_port("p|1", {oracle::tag("}")});
  odd.add_port("p 2", {oracle::tag("ends\\")});
  odd.add_pn("p|1", "a \"quoted\" {x|y} <z>");
  odd.add_pp("p|1", "p 2");
  graphs.push_back(odd);
  for (const auto& g : graphs) {
    auto dot = io::export_dot(g);
    DotChecker checker(dot);
    INFO(dot);
    REQUIRE_MESSAGE(checker.accept(), checker.error);
    CHECK(checker.edges >= g.pp().size());
    auto loose = std::count_if(g.ports().begin(), g.ports().end(),
                               [&](const auto& kv) { return g.nodes_of(kv.first).size() != 1; });
    CHECK(checker.declared_.size() == g.nodes().size() + std::size_t(loose));
  }
}

TEST_CASE("SVG of the initial Koch triangle") {
  auto svg = io::export_svg(ex::koch_init());
  Vec2 p1{-1, 0}, p2{0, std::sqrt(2.0)}, p3{1, 0};
  CHECK(same_segments(svg_segments(svg), {{p1, p2}, {p2, p3}, {p3, p1}}));
  CHECK(svg.rfind("<svg", 0) == 0);
}

TEST_CASE("SVG of the first Koch step") {
  auto init = ex::koch_init();
  const auto& g0 = init.graph();
  // Each link runs from the node of its "-" port to the node of its "+" port.
  std::vector<Segment> want;
  for (const auto& [p, q] : g0.pp()) {
    Id from = *g0.nodes_of(p).begin(), to = *g0.nodes_of(q).begin();
    if (g0.attrs(p).front() == oracle::tag("+")) std::swap(from, to);
    Vec2 a = g0.attrs(from).front().as_vector(), b = g0.attrs(to).front().as_vector();
    Vec2 d{b.x - a.x, b.y - a.y};
    Vec2 i{a.x + d.x / 3, a.y + d.y / 3}, k{a.x + 2 * d.x / 3, a.y + 2 * d.y / 3};
    double h = std::sqrt(3.0) / 6;
    Vec2 j{(a.x + b.x) / 2 - h * d.y, (a.y + b.y) / 2 + h * d.x};
    for (auto seg : {Segment{a, i}, Segment{i, j}, Segment{j, k}, Segment{k, b}}) want.push_back(seg);
  }
  auto rs = verified({ex::koch_rule()});
  auto step = auto_parallel_step(rs, init);
  REQUIRE(step.is_graph);
  auto got = svg_segments(io::export_svg(step.result));
  CHECK(got.size() == 12);
  CHECK(same_segments(got, want));
}

TEST_CASE("SVG needs one coordinate per node") {
  auto g = ex::triangle_s().graph();
  CHECK_THROWS_AS(io::export_svg(g), io::MissingCoordinates);
  auto koch = ex::koch_init().graph();
  koch.add_node("extra", {AttrValue::vector(0, 0), AttrValue::vector(1, 1)});
  try {
    io::export_svg(koch);
    FAIL("accepted a node with two coordinates");
  } catch (const io::MissingCoordinates& e) {
    CHECK(e.node() == "extra");
  }
}

TEST_CASE("generators") {
  auto koch = ex::koch_init().graph();
  CHECK(koch.nodes().size() == 3);
  CHECK(koch.ports().size() == 6);
  for (const auto& [n, a] : koch.nodes()) {
    std::multiset<std::string> tags;
    for (const auto& p : koch.ports_of(n)) tags.insert(koch.attrs(p).front().as_tag());
    CHECK(tags == std::multiset<std::string>{"+", "-"});
  }
  for (const auto& [p, q] : koch.pp()) CHECK(koch.attrs(p) != koch.attrs(q));

  auto s = ex::triangle_s();
  CHECK(s.graph().nodes().size() == 3);
  CHECK(enumerate_matches(ex::rt(), s).size() == 6);

  Rng rng(3);
  for (int round = 0; round < 25; ++round) {
    ex::GridOptions o;
    o.rows = round == 0 ? 2 : rng.uniform(1, 6);
    o.cols = round == 0 ? 2 : rng.uniform(1, 6);
    auto g = ex::moore_grid(o).graph();
    int r = o.rows, c = o.cols;
    // King moves between distinct cells of an r x c board.
    std::size_t neighbours = r * (c - 1) + c * (r - 1) + 2 * (r - 1) * (c - 1);
    CHECK(g.nodes().size() == std::size_t(r * c));
    CHECK(g.ports().size() == std::size_t(8 * r * c));
    CHECK(g.pn().size() == std::size_t(8 * r * c));
    CHECK(g.pp().size() == neighbours);
    for (const auto& [p, q] : g.pp()) CHECK(*g.nodes_of(p).begin() != *g.nodes_of(q).begin());
    if (round == 0) CHECK(neighbours == 6);
  }
  ex::GridOptions torus;
  torus.rows = torus.cols = 3;
  torus.torus = true;
  auto t = ex::moore_grid(torus).graph();
  CHECK(t.pp().size() == 4 * 9);
  CHECK(validate_graph(t).ok());
}
