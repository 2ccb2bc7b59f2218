#include <doctest.h>

#include <algorithm>

#include "portrewrite/examples.hpp"
#include "rule_oracles.hpp"

using namespace portrewrite;
namespace ex = portrewrite::examples;
using oracle::Rng;

namespace {

bool has_violation(const std::vector<RuleViolation>& vs, const std::string& c) {
  return std::any_of(vs.begin(), vs.end(), [&](const RuleViolation& v) { return v.constraint == c; });
}

std::string describe(const std::vector<RuleViolation>& vs) {
  std::string out;
  for (const auto& v : vs) out += v.constraint + ": " + v.message + "\n";
  return out;
}

std::set<Id> element_ids(const RuleSide& s) {
  std::set<Id> out;
  for (const auto& [n, a] : s.graph.nodes()) out.insert(n);
  for (const auto& [p, a] : s.graph.ports()) out.insert(p);
  return out;
}

}  // namespace

TEST_CASE("built-in rules are valid") {
  for (const auto& r : {ex::rt(), ex::rt_distinguishing(), ex::rt_asymmetric(), ex::koch_rule(), ex::gol_rule(),
                        ex::mesh_red(), ex::mesh_green(), ex::mesh_double(), ex::match1_rule(), ex::toy_rule(),
                        ex::incompatible_a(), ex::incompatible_b()}) {
    auto vs = validate_rule(r);
    INFO(r.name << "\n" << describe(vs));
    CHECK(vs.empty());
  }
}

TEST_CASE("empty rule is valid") { CHECK(validate_rule(EsrRule{}).empty()); }

TEST_CASE("link kept while its port is cut violates the pp constraint") {
  auto r = ex::rt();
  r.lhs.parts["alpha2"] = Part::Cut;
  r.lhs.pn_parts[{"alpha2", "alpha"}] = Part::Cut;
  r.lhs.pp_parts[pp_key("alpha2", "beta1")] = Part::Env;
  // alpha2 leaves the right side along with its new link.
  EsrRule mutated;
  mutated.name = r.name;
  mutated.lhs = r.lhs;
  for (const auto& [n, a] : r.rhs.graph.nodes()) mutated.rhs.add_node(n, r.rhs.part(n));
  for (const auto& [p, a] : r.rhs.graph.ports())
    if (p != "alpha2") mutated.rhs.add_port(p, r.rhs.part(p));
  for (const auto& [p, n] : r.rhs.graph.pn()) mutated.rhs.add_pn(p, n, r.rhs.pn_part(p, n));
  for (const auto& [a, b] : r.rhs.graph.pp())
    if (a != "alpha2" && b != "alpha2") mutated.rhs.add_pp(a, b, r.rhs.pp_part(a, b));

  auto direct = oracle::pp_cut_violations(mutated.lhs);
  REQUIRE(direct.size() == 1);
  CHECK(direct[0] == pp_key("alpha2", "beta1"));
  auto vs = validate_rule(mutated);
  INFO(describe(vs));
  CHECK(has_violation(vs, "2"));
  CHECK(std::all_of(vs.begin(), vs.end(), [](const RuleViolation& v) { return v.constraint == "2"; }));
}

TEST_CASE("each labeling constraint is reported by number") {
  SUBCASE("pn touching a cut node") {
    EsrRule r;
    r.lhs.add_node("n", Part::Cut);
    r.lhs.add_port("p", Part::Env);
    r.lhs.add_pn("p", "n", Part::Env);
    CHECK(has_violation(validate_rule(r), "1"));
  }
  SUBCASE("attribute of a cut element") {
    EsrRule r;
    r.lhs.add_node("n", Part::Cut, {oracle::cnum(1)}, Part::Env);
    CHECK(has_violation(validate_rule(r), "3"));
  }
  SUBCASE("rhs pn between env endpoints relabeled new") {
    EsrRule r;
    r.lhs.add_node("n", Part::Env);
    r.lhs.add_port("p", Part::Env);
    r.lhs.add_pn("p", "n", Part::Env);
    r.rhs.add_node("n", Part::Env);
    r.rhs.add_port("p", Part::Env);
    r.rhs.add_pn("p", "n", Part::New);
    CHECK(has_violation(validate_rule(r), "4"));
  }
  SUBCASE("rhs pp between env endpoints that was cut stays new") {
    EsrRule r;
    r.lhs.add_port("p", Part::Env);
    r.lhs.add_port("q", Part::Env);
    r.lhs.add_pp("p", "q", Part::Cut);
    r.rhs.add_port("p", Part::Env);
    r.rhs.add_port("q", Part::Env);
    r.rhs.add_pp("p", "q", Part::Env);
    CHECK(has_violation(validate_rule(r), "5"));
  }
  SUBCASE("env element gains an attribute without cutting one") {
    EsrRule r;
    r.lhs.add_node("n", Part::Env, {oracle::cvar("x")});
    r.rhs.add_node("n", Part::Env);
    inherit_env_attrs(r);
    r.rhs.add_attr("n", oracle::cnum(1), Part::New);
    CHECK(has_violation(validate_rule(r), "6"));
  }
  SUBCASE("rhs variable missing on the left") {
    EsrRule r;
    r.lhs.add_node("n", Part::Env, {oracle::cvar("x")}, Part::Cut);
    r.rhs.add_node("n", Part::Env, {oracle::cvar("y")}, Part::New);
    CHECK(has_violation(validate_rule(r), "variables"));
  }
  SUBCASE("variable only inside compound terms") {
    EsrRule r;
    r.lhs.add_node("n", Part::Env, {AttrTerm::add({oracle::cvar("x"), oracle::cnum(1)})});
    CHECK(has_violation(validate_rule(r), "binding"));
  }
  SUBCASE("env rhs element absent on the left") {
    EsrRule r;
    r.rhs.add_node("n", Part::Env);
    CHECK(has_violation(validate_rule(r), "env-subset"));
  }
}

TEST_CASE("random rules built to satisfy the constraints validate") {
  Rng rng(11);
  for (int i = 0; i < 300; ++i) {
    auto r = oracle::random_rule(rng, "r" + std::to_string(i));
    auto vs = validate_rule(r);
    INFO(describe(vs));
    REQUIRE(vs.empty());
    CHECK(oracle::pp_cut_violations(r.lhs).empty());
  }
}

TEST_CASE("what a valid rule adds is exactly what its rhs labels new") {
  // An rhs pn or pp pair is new exactly when an endpoint is new or the pair is
  // not an env pair of the left side; env entries repeat lhs env entries.
  Rng rng(12);
  for (int i = 0; i < 300; ++i) {
    auto r = oracle::random_rule(rng, "r");
    REQUIRE(validate_rule(r).empty());
    const auto& L = r.lhs;
    const auto& R = r.rhs;
    for (const auto& [p, n] : R.graph.pn()) {
      bool old = R.part(p) == Part::Env && R.part(n) == Part::Env && L.graph.has_pn(p, n) &&
                 L.pn_part(p, n) == Part::Env;
      CHECK((R.pn_part(p, n) == Part::New) == !old);
    }
    for (const auto& [a, b] : R.graph.pp()) {
      bool old = R.part(a) == Part::Env && R.part(b) == Part::Env && L.graph.has_pp(a, b) &&
                 L.pp_part(a, b) == Part::Env;
      CHECK((R.pp_part(a, b) == Part::New) == !old);
    }
    for (const auto& x : element_ids(R)) {
      auto env = R.attrs_with(x, Part::Env);
      if (R.part(x) == Part::New) {
        CHECK(env.empty());
        continue;
      }
      auto lenv = L.attrs_with(x, Part::Env);
      CHECK(env.size() == lenv.size());
      if (!R.attrs_with(x, Part::New).empty()) CHECK(!L.attrs_with(x, Part::Cut).empty());
    }
  }
}

TEST_CASE("fresh variants are valid, disjoint and reversible") {
  auto r = ex::koch_rule();
  auto v1 = fresh_variant(r, "1");
  auto v2 = fresh_variant(r, "2");
  CHECK(validate_rule(v1.rule).empty());
  auto ids1 = element_ids(v1.rule.lhs), ids2 = element_ids(v2.rule.lhs);
  for (const auto& x : element_ids(v1.rule.rhs)) ids1.insert(x);
  for (const auto& x : element_ids(v2.rule.rhs)) ids2.insert(x);
  for (const auto& x : ids1) {
    CHECK(!ids2.count(x));
    CHECK(x.ends_with(variant_suffix("1")));
  }
  auto vars1 = v1.rule.lhs.variables(), vars2 = v2.rule.lhs.variables();
  for (const auto& v : vars1) CHECK(!vars2.count(v));
  auto back = v1.original();
  CHECK(back.lhs.graph == r.lhs.graph);
  CHECK(back.rhs.graph == r.rhs.graph);
  CHECK(back.lhs.parts == r.lhs.parts);
  CHECK(back.rhs.pp_parts == r.rhs.pp_parts);
  CHECK(back.rhs.attr_parts == r.rhs.attr_parts);

  VariantCounter counter;
  CHECK(fresh_variant(r, counter).tag == "1");
  CHECK(fresh_variant(r, counter).tag == "2");
}

TEST_CASE("lhs automorphisms agree with brute force") {
  CHECK(enumerate_automorphisms(ex::rt().lhs).size() == 6);
  CHECK(oracle::brute_automorphism_count(ex::rt().lhs) == 6);
  CHECK(enumerate_automorphisms(ex::rt_distinguishing().lhs).size() == 1);
  CHECK(oracle::brute_automorphism_count(ex::rt_distinguishing().lhs) == 1);
  CHECK(enumerate_automorphisms(ex::koch_rule().lhs).size() == 1);

  RuleSide single;
  single.add_node("n", Part::Env);
  CHECK(enumerate_automorphisms(single).size() == 1);

  // The eight neighbor arms of the life rule permute freely.
  CHECK(enumerate_automorphisms(ex::gol_rule().lhs).size() == 40320);

  Rng rng(13);
  for (int i = 0; i < 150; ++i) {
    auto r = oracle::random_rule(rng, "r", 3, 5);
    INFO(i);
    CHECK(enumerate_automorphisms(r.lhs).size() == oracle::brute_automorphism_count(r.lhs));
  }
}

TEST_CASE("automorphisms compose and invert within the list") {
  auto auts = enumerate_automorphisms(ex::rt().lhs);
  std::set<std::vector<int>> perms;
  for (std::size_t i = 0; i < auts.size(); ++i) perms.insert(auts.perm(i));
  for (std::size_t i = 0; i < auts.size(); ++i)
    for (std::size_t j = 0; j < auts.size(); ++j) {
      const auto& a = auts.perm(i);
      const auto& b = auts.perm(j);
      std::vector<int> c(a.size());
      for (std::size_t k = 0; k < a.size(); ++k) c[k] = a[static_cast<std::size_t>(b[k])];
      CHECK(perms.count(c));
    }
}

TEST_CASE("symmetry condition") {
  CHECK(check_symmetry_condition(ex::rt()).holds);
  CHECK(check_symmetry_condition(ex::rt_distinguishing()).holds);
  CHECK(check_symmetry_condition(ex::koch_rule()).holds);
  CHECK(check_symmetry_condition(ex::gol_rule()).holds);
  CHECK(check_symmetry_condition(ex::mesh_red()).holds);
  CHECK(check_symmetry_condition(ex::mesh_green()).holds);
  CHECK(check_symmetry_condition(ex::mesh_double()).holds);
  auto asym = check_symmetry_condition(ex::rt_asymmetric());
  CHECK_FALSE(asym.holds);
  CHECK(asym.failing.has_value());
  CHECK(asym.lhs.size() == 6);

  auto rt = check_symmetry_condition(ex::rt());
  CHECK(rt.rhs_partners.size() == rt.lhs.size());
}

TEST_CASE("parallel safety") {
  CHECK(check_parallel_safety(ex::rt()));
  CHECK(check_parallel_safety(ex::koch_rule()));
  CHECK(check_parallel_safety(ex::gol_rule()));
  CHECK(check_parallel_safety(ex::mesh_red()));
  CHECK_FALSE(check_parallel_safety(ex::toy_rule()));
}

TEST_CASE("compatibility") {
  CHECK(check_compatibility(ex::rt(), ex::rt()).compatible);
  CHECK(check_compatibility(ex::koch_rule(), ex::koch_rule()).compatible);
  CHECK(check_compatibility(ex::gol_rule(), ex::gol_rule()).compatible);

  auto ab = check_compatibility(ex::incompatible_a(), ex::incompatible_b());
  auto ba = check_compatibility(ex::incompatible_b(), ex::incompatible_a());
  CHECK_FALSE(ab.compatible);
  CHECK_FALSE(ba.compatible);
  REQUIRE(ab.counterexample.has_value());
  CHECK(ab.counterexample->identified == std::vector<std::pair<Id, Id>>{{"x", "z"}});

  auto cf = check_conflict_free({ex::incompatible_a(), ex::incompatible_b()});
  CHECK_FALSE(cf.conflict_free);
  REQUIRE(cf.failing_pair.has_value());
  CHECK(cf.failing_pair->first == "A");
  CHECK(cf.failing_pair->second == "B");

  CHECK(check_conflict_free({ex::rt()}).conflict_free);
  CHECK(check_conflict_free({ex::koch_rule()}).conflict_free);
  CHECK(check_conflict_free({ex::mesh_red(), ex::mesh_green(), ex::mesh_double()}).conflict_free);
}

TEST_CASE("compatibility verdict does not depend on argument order") {
  Rng rng(14);
  for (int i = 0; i < 200; ++i) {
    auto a = oracle::random_rule(rng, "a", 2, 3);
    auto b = oracle::random_rule(rng, "b", 2, 3);
    CHECK(check_compatibility(a, b).compatible == check_compatibility(b, a).compatible);
  }
}

TEST_CASE("rules without cut elements are compatible with everything") {
  Rng rng(15);
  auto keep = ex::match1_rule();
  for (int i = 0; i < 100; ++i) {
    auto b = oracle::random_rule(rng, "b", 2, 4);
    CHECK(check_compatibility(keep, b).compatible);
  }
}

TEST_CASE("rule system caches analyses") {
  RuleSystem rs({ex::rt(), ex::koch_rule()});
  CHECK_FALSE(rs.symmetry("R_T").has_value());
  rs.verify_symmetry();
  REQUIRE(rs.symmetry("R_T").has_value());
  CHECK(rs.symmetry("R_T")->holds);
  CHECK(rs.parallel_safe("R_T"));
  rs.verify_conflict_freedom();
  REQUIRE(rs.conflict_freedom().has_value());
  CHECK(rs.conflict_freedom()->conflict_free);

  auto bad = ex::rt();
  bad.lhs.pp_parts[pp_key("alpha2", "beta1")] = Part::Env;
  bad.lhs.parts["alpha2"] = Part::Cut;
  CHECK_THROWS_AS(RuleSystem({bad}), InvalidRule);
  CHECK_THROWS_AS(RuleSystem({ex::rt(), ex::rt()}), std::invalid_argument);
}
