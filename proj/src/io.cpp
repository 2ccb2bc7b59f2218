#include "portrewrite/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace portrewrite::io {

namespace {

std::string at(const std::string& path, const std::string& key) { return path + "." + key; }
std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const Json& object(const Json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ParseError(path, "expected an object");
  for (const auto& [key, v] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ParseError(at(path, key), "unknown field");
  }
  return j;
}

const Json& field(const Json& j, const char* key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(at(path, key), "missing field");
  return *it;
}

const Json& array(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path, "expected an array");
  return j;
}

std::string string(const Json& j, const std::string& path) {
  if (!j.is_string()) throw ParseError(path, "expected a string");
  auto s = j.get<std::string>();
  if (s.empty()) throw ParseError(path, "empty string");
  return s;
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ParseError(path, "expected a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError(path, "number is not finite");
  return v;
}

std::uint64_t count(const Json& j, const std::string& path) {
  if (!j.is_number_unsigned()) throw ParseError(path, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

bool boolean(const Json& j, const std::string& path) {
  if (!j.is_boolean()) throw ParseError(path, "expected a boolean");
  return j.get<bool>();
}

// Rethrows library argument errors at the document position that caused them.
template <class F>
void located(const std::string& path, F&& f) {
  try {
    f();
  } catch (const std::invalid_argument& e) {
    throw ParseError(path, e.what());
  } catch (const std::out_of_range& e) {
    throw ParseError(path, e.what());
  }
}

std::pair<std::string, std::string> pair_of(const Json& j, const std::string& path, std::size_t max_size = 2) {
  array(j, path);
  if (j.size() < 2 || j.size() > max_size)
    throw ParseError(path, max_size == 2 ? "expected a pair" : "expected a pair with an optional part");
  return {string(j[0], at(path, 0)), string(j[1], at(path, 1))};
}

Part side_part(const Json& j, const std::string& path, bool left) {
  auto s = string(j, path);
  if (s != "cut" && s != "env" && s != "new") throw ParseError(path, "unknown part '" + s + "'");
  Part p = parse_part(s);
  if (left && p == Part::New) throw ParseError(path, "lhs elements are cut or env");
  if (!left && p == Part::Cut) throw ParseError(path, "rhs elements are new or env");
  return p;
}

Json ids_to_json(const std::vector<Id>& ids) { return Json(ids); }

Json row(std::initializer_list<std::string> items) {
  Json out = Json::array();
  for (const auto& x : items) out.push_back(x);
  return out;
}

std::vector<Id> ids_from_json(const Json& j, const std::string& path) {
  array(j, path);
  std::vector<Id> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(string(j[i], at(path, i)));
  return out;
}

std::map<Id, Id> id_map_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ParseError(path, "expected an object");
  std::map<Id, Id> out;
  for (const auto& [k, v] : j.items()) out[k] = string(v, at(path, k));
  return out;
}

}  // namespace

Json parse_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), "invalid JSON");
  }
}

std::string emit(const Json& j) { return j.dump(2) + "\n"; }

Json value_to_json(const AttrValue& v) {
  switch (v.kind()) {
    case AttrKind::Number:
      return v.as_number();
    case AttrKind::Tag:
      return v.as_tag();
    case AttrKind::Vector:
      return Json::array({v.as_vector().x, v.as_vector().y});
  }
  return nullptr;
}

AttrValue value_from_json(const Json& j, const std::string& path) {
  if (j.is_number()) return AttrValue::number(number(j, path));
  if (j.is_string()) return AttrValue::tag(string(j, path));
  if (j.is_array() && j.size() == 2)
    return AttrValue::vector(number(j[0], at(path, 0)), number(j[1], at(path, 1)));
  throw ParseError(path, "expected a number, a tag or an [x, y] vector");
}

Json term_to_json(const AttrTerm& t) {
  auto list = [&](const char* op) {
    Json out = Json::array({op});
    for (const auto& a : t.args()) out.push_back(term_to_json(a));
    return out;
  };
  switch (t.op()) {
    case TermOp::Const: return value_to_json(t.value());
    case TermOp::Var: return Json::array({"var", t.name()});
    case TermOp::Add: return list("add");
    case TermOp::Sub: return list("sub");
    case TermOp::Mul: return list("mul");
    case TermOp::Div: return list("div");
    case TermOp::Scale: return Json::array({"scale", t.factor().str(), term_to_json(t.args()[0])});
    case TermOp::Eq: return list("eq");
    case TermOp::Vec: return list("vec");
    case TermOp::Perp: return list("perp");
    case TermOp::Sqrt: return Json::array({"sqrt", t.value().as_number()});
  }
  return nullptr;
}

AttrTerm term_from_json(const Json& j, const std::string& path) {
  if (j.is_number() || j.is_string()) return AttrTerm::constant(value_from_json(j, path));
  if (!j.is_array() || j.empty()) throw ParseError(path, "expected a term");
  if (j[0].is_number()) return AttrTerm::constant(value_from_json(j, path));
  auto op = string(j[0], at(path, 0));
  auto args = [&](std::size_t lo, std::size_t hi) {
    if (j.size() - 1 < lo || j.size() - 1 > hi)
      throw ParseError(path, "'" + op + "' takes " + std::to_string(lo) +
                                 (hi == lo ? "" : hi > 100 ? " or more" : " to " + std::to_string(hi)) +
                                 " arguments");
    std::vector<AttrTerm> out;
    for (std::size_t i = 1; i < j.size(); ++i) out.push_back(term_from_json(j[i], at(path, i)));
    return out;
  };
  if (op == "var") {
    if (j.size() != 2) throw ParseError(path, "'var' takes a name");
    return AttrTerm::var(string(j[1], at(path, 1)));
  }
  if (op == "add") return AttrTerm::add(args(1, SIZE_MAX));
  if (op == "mul") return AttrTerm::mul(args(1, SIZE_MAX));
  if (op == "sub") {
    auto a = args(2, 2);
    return AttrTerm::sub(a[0], a[1]);
  }
  if (op == "div") {
    auto a = args(2, 2);
    return AttrTerm::div(a[0], a[1]);
  }
  if (op == "eq") {
    auto a = args(2, 2);
    return AttrTerm::eq(a[0], a[1]);
  }
  if (op == "vec") {
    auto a = args(2, 2);
    return AttrTerm::vec(a[0], a[1]);
  }
  if (op == "perp") return AttrTerm::perp(args(1, 1)[0]);
  if (op == "scale") {
    if (j.size() != 3) throw ParseError(path, "'scale' takes a factor and a term");
    Rational f;
    located(at(path, 1), [&] { f = Rational::parse(string(j[1], at(path, 1))); });
    return AttrTerm::scale(f, term_from_json(j[2], at(path, 2)));
  }
  if (op == "sqrt") {
    if (j.size() != 2) throw ParseError(path, "'sqrt' takes a number");
    double v = number(j[1], at(path, 1));
    if (v < 0) throw ParseError(at(path, 1), "square root of a negative number");
    return AttrTerm::sqrt(v);
  }
  throw ParseError(at(path, 0), "unknown operator '" + op + "'");
}

Json graph_to_json(const Pregraph& g) {
  auto elements = [](const std::map<Id, std::vector<AttrValue>>& m) {
    Json out = Json::array();
    for (const auto& [id, attrs] : m) {
      Json a = Json::array();
      for (const auto& v : attrs) a.push_back(value_to_json(v));
      out.push_back({{"id", id}, {"attrs", a}});
    }
    return out;
  };
  Json pn = Json::array(), pp = Json::array();
  for (const auto& [p, n] : g.pn()) pn.push_back(row({p, n}));
  for (const auto& [a, b] : g.pp()) pp.push_back(row({a, b}));
  return {{"nodes", elements(g.nodes())}, {"ports", elements(g.ports())}, {"pn", pn}, {"pp", pp}};
}

Pregraph graph_from_json(const Json& j, const std::string& path) {
  object(j, path, {"nodes", "ports", "pn", "pp"});
  Pregraph g;
  std::set<Id> seen;
  auto elements = [&](const char* key, bool nodes) {
    if (!j.contains(key)) return;
    const auto& list = array(j[key], at(path, key));
    for (std::size_t i = 0; i < list.size(); ++i) {
      auto p = at(at(path, key), i);
      object(list[i], p, {"id", "attrs"});
      auto id = string(field(list[i], "id", p), at(p, "id"));
      if (!seen.insert(id).second) throw ParseError(at(p, "id"), "duplicate identifier '" + id + "'");
      std::vector<AttrValue> attrs;
      if (list[i].contains("attrs")) {
        const auto& a = array(list[i]["attrs"], at(p, "attrs"));
        for (std::size_t k = 0; k < a.size(); ++k) attrs.push_back(value_from_json(a[k], at(at(p, "attrs"), k)));
      }
      if (nodes)
        g.add_node(id, std::move(attrs));
      else
        g.add_port(id, std::move(attrs));
    }
  };
  elements("nodes", true);
  elements("ports", false);
  if (j.contains("pn")) {
    const auto& list = array(j["pn"], at(path, "pn"));
    for (std::size_t i = 0; i < list.size(); ++i) {
      auto [p, n] = pair_of(list[i], at(at(path, "pn"), i));
      located(at(at(path, "pn"), i), [&] { g.add_pn(p, n); });
    }
  }
  if (j.contains("pp")) {
    const auto& list = array(j["pp"], at(path, "pp"));
    for (std::size_t i = 0; i < list.size(); ++i) {
      auto [a, b] = pair_of(list[i], at(at(path, "pp"), i));
      located(at(at(path, "pp"), i), [&] { g.add_pp(a, b); });
    }
  }
  return g;
}

namespace {

Json side_to_json(const RuleSide& s) {
  auto elements = [&](const std::map<Id, std::vector<AttrTerm>>& m) {
    Json out = Json::array();
    for (const auto& [id, terms] : m) {
      Part part = s.part(id);
      Json a = Json::array();
      for (const auto& t : terms) {
        Part ap = s.attr_part(id, t);
        if (ap == part)
          a.push_back(term_to_json(t));
        else
          a.push_back({{"term", term_to_json(t)}, {"part", to_string(ap)}});
      }
      out.push_back({{"id", id}, {"part", to_string(part)}, {"attrs", a}});
    }
    return out;
  };
  Json pn = Json::array(), pp = Json::array();
  for (const auto& [p, n] : s.graph.pn()) pn.push_back(row({p, n, to_string(s.pn_part(p, n))}));
  for (const auto& [a, b] : s.graph.pp()) pp.push_back(row({a, b, to_string(s.pp_part(a, b))}));
  return {{"nodes", elements(s.graph.nodes())}, {"ports", elements(s.graph.ports())}, {"pn", pn}, {"pp", pp}};
}

RuleSide side_from_json(const Json& j, const std::string& path, bool left) {
  object(j, path, {"nodes", "ports", "pn", "pp"});
  RuleSide s;
  std::set<Id> seen;
  auto elements = [&](const char* key, bool nodes) {
    if (!j.contains(key)) return;
    const auto& list = array(j[key], at(path, key));
    for (std::size_t i = 0; i < list.size(); ++i) {
      auto p = at(at(path, key), i);
      object(list[i], p, {"id", "part", "attrs"});
      auto id = string(field(list[i], "id", p), at(p, "id"));
      if (!seen.insert(id).second) throw ParseError(at(p, "id"), "duplicate identifier '" + id + "'");
      Part part = side_part(field(list[i], "part", p), at(p, "part"), left);
      if (nodes)
        s.add_node(id, part);
      else
        s.add_port(id, part);
      if (!list[i].contains("attrs")) continue;
      const auto& a = array(list[i]["attrs"], at(p, "attrs"));
      for (std::size_t k = 0; k < a.size(); ++k) {
        auto ap = at(at(p, "attrs"), k);
        if (a[k].is_object()) {
          object(a[k], ap, {"term", "part"});
          s.add_attr(id, term_from_json(field(a[k], "term", ap), at(ap, "term")),
                     side_part(field(a[k], "part", ap), at(ap, "part"), left));
        } else {
          s.add_attr(id, term_from_json(a[k], ap), part);
        }
      }
    }
  };
  elements("nodes", true);
  elements("ports", false);
  // Unlabeled pairs take cut (new) when an endpoint does, env otherwise.
  auto pair_part = [&](const Json& item, const std::string& p, const Id& a, const Id& b) {
    if (item.size() == 3) return side_part(item[2], at(p, 2), left);
    Part changed = left ? Part::Cut : Part::New;
    Part pa = Part::Env, pb = Part::Env;
    located(p, [&] {
      pa = s.part(a);
      pb = s.part(b);
    });
    return pa == changed || pb == changed ? changed : Part::Env;
  };
  if (j.contains("pn")) {
    const auto& list = array(j["pn"], at(path, "pn"));
    for (std::size_t i = 0; i < list.size(); ++i) {
      auto p = at(at(path, "pn"), i);
      auto [port, node] = pair_of(list[i], p, 3);
      Part part = pair_part(list[i], p, port, node);
      located(p, [&] { s.add_pn(port, node, part); });
    }
  }
  if (j.contains("pp")) {
    const auto& list = array(j["pp"], at(path, "pp"));
    for (std::size_t i = 0; i < list.size(); ++i) {
      auto p = at(at(path, "pp"), i);
      auto [a, b] = pair_of(list[i], p, 3);
      Part part = pair_part(list[i], p, a, b);
      located(p, [&] { s.add_pp(a, b, part); });
    }
  }
  return s;
}

}  // namespace

Json rule_to_json(const EsrRule& r) {
  return {{"name", r.name}, {"lhs", side_to_json(r.lhs)}, {"rhs", side_to_json(r.rhs)}};
}

EsrRule rule_from_json(const Json& j, const std::string& path) {
  object(j, path, {"name", "lhs", "rhs"});
  EsrRule r;
  r.name = string(field(j, "name", path), at(path, "name"));
  r.lhs = side_from_json(field(j, "lhs", path), at(path, "lhs"), true);
  r.rhs = side_from_json(field(j, "rhs", path), at(path, "rhs"), false);
  inherit_env_attrs(r);
  return r;
}

Json rules_to_json(const std::vector<EsrRule>& rules) {
  Json list = Json::array();
  for (const auto& r : rules) list.push_back(rule_to_json(r));
  return {{"rules", list}};
}

std::vector<EsrRule> rules_from_json(const Json& j, const std::string& path) {
  object(j, path, {"rules"});
  const auto& list = array(field(j, "rules", path), at(path, "rules"));
  std::vector<EsrRule> out;
  std::set<std::string> names;
  for (std::size_t i = 0; i < list.size(); ++i) {
    out.push_back(rule_from_json(list[i], at(at(path, "rules"), i)));
    if (!names.insert(out.back().name).second)
      throw ParseError(at(at(at(path, "rules"), i), "name"), "duplicate rule name '" + out.back().name + "'");
  }
  return out;
}

Json match_to_json(const Match& m) {
  Json subst = Json::object();
  for (const auto& [v, x] : m.subst) subst[v] = value_to_json(x);
  return {{"rule", m.rule_name()}, {"tag", m.tag}, {"nodes", m.nodes}, {"ports", m.ports}, {"subst", subst}};
}

namespace {

Match match_with_rule(const Json& j, std::shared_ptr<const EsrRule> rule, const std::string& path) {
  Match m;
  m.rule = std::move(rule);
  m.tag = string(field(j, "tag", path), at(path, "tag"));
  m.nodes = id_map_from_json(field(j, "nodes", path), at(path, "nodes"));
  m.ports = id_map_from_json(field(j, "ports", path), at(path, "ports"));
  const auto& L = m.rule->lhs.graph;
  auto covers = [&](const std::map<Id, Id>& map, const std::map<Id, std::vector<AttrTerm>>& elems, const char* key) {
    bool same = map.size() == elems.size();
    for (const auto& [id, a] : elems) same = same && map.count(id);
    if (!same) throw ParseError(at(path, key), "must map exactly the lhs " + std::string(key) + " of the rule");
  };
  covers(m.nodes, L.nodes(), "nodes");
  covers(m.ports, L.ports(), "ports");
  const auto& subst = field(j, "subst", path);
  if (!subst.is_object()) throw ParseError(at(path, "subst"), "expected an object");
  for (const auto& [v, x] : subst.items()) m.subst[v] = value_from_json(x, at(at(path, "subst"), v));
  auto vars = m.rule->lhs.variables();
  bool same = vars.size() == m.subst.size();
  for (const auto& v : vars) same = same && m.subst.count(v);
  if (!same) throw ParseError(at(path, "subst"), "must bind exactly the lhs variables of the rule");
  return m;
}

class RuleLookup {
 public:
  explicit RuleLookup(const std::vector<EsrRule>& rules) {
    for (const auto& r : rules) by_name_[r.name] = std::make_shared<const EsrRule>(r);
  }
  std::shared_ptr<const EsrRule> get(const Json& j, const std::string& path) const {
    auto name = string(j, path);
    auto it = by_name_.find(name);
    if (it == by_name_.end()) throw ParseError(path, "unknown rule '" + name + "'");
    return it->second;
  }
  Match match(const Json& j, const std::string& path) const {
    object(j, path, {"rule", "tag", "nodes", "ports", "subst"});
    return match_with_rule(j, get(field(j, "rule", path), at(path, "rule")), path);
  }

 private:
  std::map<std::string, std::shared_ptr<const EsrRule>> by_name_;
};

std::vector<Match> match_list(const Json& j, const RuleLookup& rules, const std::string& path) {
  array(j, path);
  std::vector<Match> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(rules.match(j[i], at(path, i)));
  return out;
}

GraphViolation::Kind violation_kind(const Json& j, const std::string& path) {
  auto s = string(j, path);
  for (auto k : {GraphViolation::Kind::MultipleNodes, GraphViolation::Kind::MultipleLinks,
                 GraphViolation::Kind::SelfLink})
    if (to_string(k) == s) return k;
  throw ParseError(path, "unknown violation kind '" + s + "'");
}

StepResult step_with(const Json& j, const RuleLookup& rules, const std::string& path) {
  object(j, path, {"result", "intermediate", "is_graph", "violations", "quotient", "matches", "dangling_dropped",
                   "collapsed_rules"});
  StepResult s;
  s.result = graph_from_json(field(j, "result", path), at(path, "result"));
  if (j.contains("intermediate")) s.intermediate = graph_from_json(j["intermediate"], at(path, "intermediate"));
  s.is_graph = boolean(field(j, "is_graph", path), at(path, "is_graph"));
  const auto& vs = array(field(j, "violations", path), at(path, "violations"));
  for (std::size_t i = 0; i < vs.size(); ++i) {
    auto p = at(at(path, "violations"), i);
    object(vs[i], p, {"port", "kind", "offending"});
    s.violations.push_back({string(field(vs[i], "port", p), at(p, "port")),
                            violation_kind(field(vs[i], "kind", p), at(p, "kind")),
                            ids_from_json(field(vs[i], "offending", p), at(p, "offending"))});
  }
  s.quotient_map = quotient_map_from_json(field(j, "quotient", path), s.result, at(path, "quotient"));
  s.matches_used = match_list(field(j, "matches", path), rules, at(path, "matches"));
  s.dangling_dropped = count(field(j, "dangling_dropped", path), at(path, "dangling_dropped"));
  s.collapsed_rules = ids_from_json(field(j, "collapsed_rules", path), at(path, "collapsed_rules"));
  return s;
}

}  // namespace

Match match_from_json(const Json& j, const std::vector<EsrRule>& rules, const std::string& path) {
  return RuleLookup(rules).match(j, path);
}

Json matches_to_json(const std::vector<Match>& ms) {
  Json list = Json::array();
  for (const auto& m : ms) list.push_back(match_to_json(m));
  return {{"matches", list}};
}

std::vector<Match> matches_from_json(const Json& j, const std::vector<EsrRule>& rules, const std::string& path) {
  object(j, path, {"matches"});
  return match_list(field(j, "matches", path), RuleLookup(rules), at(path, "matches"));
}

Json quotient_map_to_json(const QuotientMap& q) {
  return {{"nodes", q.merged_nodes()}, {"ports", q.merged_ports()}};
}

QuotientMap quotient_map_from_json(const Json& j, const Pregraph& result, const std::string& path) {
  object(j, path, {"nodes", "ports"});
  QuotientMap q;
  auto classes = [&](const char* key, const std::map<Id, std::vector<AttrValue>>& elements,
                     std::map<Id, Id>& of, std::map<Id, std::vector<Id>>& members) {
    const auto& m = field(j, key, path);
    if (!m.is_object()) throw ParseError(at(path, key), "expected an object");
    for (const auto& [cls, list] : m.items()) {
      auto p = at(at(path, key), cls);
      if (!elements.count(cls)) throw ParseError(p, "class '" + cls + "' is not an element of the result");
      auto ids = ids_from_json(list, p);
      for (const auto& id : ids)
        if (!of.emplace(id, cls).second) throw ParseError(p, "'" + id + "' belongs to two classes");
      members[cls] = std::move(ids);
    }
    for (const auto& [id, a] : elements)
      if (!members.count(id)) {
        members[id] = {id};
        if (!of.emplace(id, id).second) throw ParseError(at(path, key), "'" + id + "' belongs to two classes");
      }
  };
  classes("nodes", result.nodes(), q.node_class, q.node_classes);
  classes("ports", result.ports(), q.port_class, q.port_classes);
  return q;
}

Json violations_to_json(const std::vector<GraphViolation>& vs) {
  Json out = Json::array();
  for (const auto& v : vs)
    out.push_back(
        Json::object({{"port", v.port}, {"kind", to_string(v.kind)}, {"offending", ids_to_json(v.offending)}}));
  return out;
}

Json step_to_json(const StepResult& s) {
  Json out = {{"result", graph_to_json(s.result)},
              {"intermediate", graph_to_json(s.intermediate)},
              {"is_graph", s.is_graph},
              {"violations", violations_to_json(s.violations)},
              {"quotient", quotient_map_to_json(s.quotient_map)},
              {"matches", matches_to_json(s.matches_used)["matches"]},
              {"dangling_dropped", s.dangling_dropped},
              {"collapsed_rules", s.collapsed_rules}};
  return out;
}

StepResult step_from_json(const Json& j, const std::vector<EsrRule>& rules, const std::string& path) {
  return step_with(j, RuleLookup(rules), path);
}

Json report_to_json(const RunReport& r, ReportOptions options) {
  Json steps = Json::array();
  for (const auto& s : r.steps) {
    auto j = step_to_json(s);
    if (!options.intermediate) j.erase("intermediate");
    steps.push_back(std::move(j));
  }
  Json out = {{"initial", graph_to_json(r.initial)},
              {"steps", steps},
              {"stop", to_string(r.stop)},
              {"fixpoint_step", r.fixpoint_step ? Json(*r.fixpoint_step) : Json(nullptr)}};
  if (options.timings) {
    Json t = Json::array();
    for (const auto& d : r.timings) t.push_back(d.count() * 1000.0);
    out["timings_ms"] = t;
  }
  return out;
}

RunReport report_from_json(const Json& j, const std::vector<EsrRule>& rules, const std::string& path) {
  object(j, path, {"initial", "steps", "stop", "fixpoint_step", "timings_ms"});
  RuleLookup lookup(rules);
  RunReport r;
  r.initial = graph_from_json(field(j, "initial", path), at(path, "initial"));
  const auto& steps = array(field(j, "steps", path), at(path, "steps"));
  for (std::size_t i = 0; i < steps.size(); ++i) r.steps.push_back(step_with(steps[i], lookup, at(at(path, "steps"), i)));
  auto stop = string(field(j, "stop", path), at(path, "stop"));
  if (stop == "budget")
    r.stop = StopReason::Budget;
  else if (stop == "fixpoint")
    r.stop = StopReason::Fixpoint;
  else if (stop == "non-graph")
    r.stop = StopReason::NonGraph;
  else
    throw ParseError(at(path, "stop"), "unknown stop reason '" + stop + "'");
  const auto& fp = field(j, "fixpoint_step", path);
  if (!fp.is_null()) r.fixpoint_step = count(fp, at(path, "fixpoint_step"));
  if (j.contains("timings_ms")) {
    const auto& t = array(j["timings_ms"], at(path, "timings_ms"));
    for (std::size_t i = 0; i < t.size(); ++i)
      r.timings.emplace_back(number(t[i], at(at(path, "timings_ms"), i)) / 1000.0);
  }
  return r;
}

namespace {

// DOT strings only unescape \", and a backslash right before the closing
// quote would escape it.
std::string dot_string(const std::string& content) {
  std::string out = "\"";
  for (char c : content) {
    if (c == '"') out += '\\';
    out += c;
  }
  if (!content.empty() && content.back() == '\\') out += ' ';
  return out + "\"";
}

// Plain labels: backslash sequences such as \n or \N are directives.
std::string label_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out;
}

// Record labels additionally treat braces, bars, angle brackets and spaces
// as syntax.
std::string record_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '\\' || c == '{' || c == '}' || c == '|' || c == '<' || c == '>' || c == ' ') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out;
}

std::string with_attrs(const Id& id, const std::vector<AttrValue>& attrs) {
  if (attrs.empty()) return id;
  std::string s = id + " {";
  for (std::size_t i = 0; i < attrs.size(); ++i) s += (i ? ", " : "") + to_string(attrs[i]);
  return s + "}";
}

std::string format(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string export_dot(const Pregraph& g) {
  std::ostringstream out;
  out << "graph G {\n  node [shape=record];\n";
  std::map<Id, std::string> node_id, endpoint;
  for (const auto& [n, attrs] : g.nodes()) node_id[n] = "n" + std::to_string(node_id.size());
  for (const auto& [n, attrs] : g.nodes()) {
    const std::string& id = node_id[n];
    std::string label = record_escape(with_attrs(n, attrs));
    std::vector<std::string> fields;
    for (const auto& p : g.ports_of(n)) {
      if (g.nodes_of(p).size() != 1) continue;
      std::string f = "f" + std::to_string(fields.size());
      fields.push_back("<" + f + "> " + record_escape(with_attrs(p, g.attrs(p))));
      endpoint[p] = id + ":" + f;
    }
    if (!fields.empty()) {
      label = "{" + label + "|{";
      for (std::size_t i = 0; i < fields.size(); ++i) label += (i ? "|" : "") + fields[i];
      label += "}}";
    }
    out << "  " << id << " [label=" << dot_string(label) << "];\n";
  }
  std::size_t next = 0;
  for (const auto& [p, attrs] : g.ports()) {
    if (endpoint.count(p)) continue;
    std::string id = "p" + std::to_string(next++);
    endpoint[p] = id;
    out << "  " << id << " [shape=point, xlabel=" << dot_string(label_escape(with_attrs(p, attrs))) << "];\n";
    for (const auto& n : g.nodes_of(p)) out << "  " << id << " -- " << node_id[n] << " [style=dashed];\n";
  }
  for (const auto& [a, b] : g.pp()) out << "  " << endpoint[a] << " -- " << endpoint[b] << ";\n";
  out << "}\n";
  return out.str();
}

std::string export_svg(const Pregraph& g) {
  std::map<Id, Vec2> at;
  for (const auto& [n, attrs] : g.nodes()) {
    if (attrs.size() != 1 || attrs.front().kind() != AttrKind::Vector) throw MissingCoordinates(n);
    at[n] = attrs.front().as_vector();
  }
  double lo_x = 0, hi_x = 1, lo_y = 0, hi_y = 1;
  if (!at.empty()) {
    lo_x = hi_x = at.begin()->second.x;
    lo_y = hi_y = at.begin()->second.y;
    for (const auto& [n, v] : at) {
      lo_x = std::min(lo_x, v.x);
      hi_x = std::max(hi_x, v.x);
      lo_y = std::min(lo_y, v.y);
      hi_y = std::max(hi_y, v.y);
    }
  }
  double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-9});
  double margin = span * 0.05;
  std::ostringstream out;
  // The group flips the y axis, so line coordinates are the node coordinates.
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << format(lo_x - margin) << " "
      << format(-hi_y - margin) << " " << format(hi_x - lo_x + 2 * margin) << " " << format(hi_y - lo_y + 2 * margin)
      << "\" width=\"800\" height=\"800\">\n";
  out << "  <g transform=\"scale(1,-1)\" stroke=\"black\" stroke-width=\"1\" vector-effect=\"non-scaling-stroke\" "
         "fill=\"none\">\n";
  for (const auto& [p, q] : g.pp()) {
    const auto& np = g.nodes_of(p);
    const auto& nq = g.nodes_of(q);
    if (np.size() != 1 || nq.size() != 1) continue;
    Vec2 a = at[*np.begin()], b = at[*nq.begin()];
    out << "    <line x1=\"" << format(a.x) << "\" y1=\"" << format(a.y) << "\" x2=\"" << format(b.x) << "\" y2=\""
        << format(b.y) << "\" vector-effect=\"non-scaling-stroke\"/>\n";
  }
  out << "  </g>\n</svg>\n";
  return out.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
}

}  // namespace portrewrite::io
