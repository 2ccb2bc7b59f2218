#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace portrewrite {

inline constexpr double kEpsilon = 1e-9;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

enum class AttrKind { Number, Tag, Vector };

// A ground attribute value. Numbers are finite doubles, tags are non-empty.
class AttrValue {
 public:
  AttrValue() = default;
  static AttrValue number(double v);
  static AttrValue tag(std::string t);
  static AttrValue vector(double x, double y);
  static AttrValue vector(Vec2 v) { return vector(v.x, v.y); }

  AttrKind kind() const { return static_cast<AttrKind>(v_.index()); }
  double as_number() const;
  const std::string& as_tag() const;
  Vec2 as_vector() const;

  friend bool operator==(const AttrValue&, const AttrValue&) = default;

 private:
  std::variant<double, std::string, Vec2> v_{0.0};
};

bool approx_equal(double a, double b);
bool approx_equal(const AttrValue& a, const AttrValue& b);
// Strict total order: kind first, then value.
bool operator<(const AttrValue& a, const AttrValue& b);
std::string to_string(const AttrValue& v);

// Exact rational factor for Scale terms, e.g. "2/3".
struct Rational {
  std::int64_t num = 1;
  std::int64_t den = 1;
  static Rational parse(const std::string& text);
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;
  friend bool operator==(const Rational&, const Rational&) = default;
};

enum class TermOp { Const, Var, Add, Sub, Mul, Div, Scale, Eq, Vec, Perp, Sqrt };

class AttrTerm {
 public:
  AttrTerm() = default;
  static AttrTerm constant(AttrValue v);
  static AttrTerm var(std::string name);
  static AttrTerm add(std::vector<AttrTerm> args);
  static AttrTerm sub(AttrTerm a, AttrTerm b);
  static AttrTerm mul(std::vector<AttrTerm> args);
  static AttrTerm div(AttrTerm a, AttrTerm b);
  static AttrTerm scale(Rational factor, AttrTerm t);
  static AttrTerm eq(AttrTerm a, AttrTerm b);
  static AttrTerm vec(AttrTerm x, AttrTerm y);
  static AttrTerm perp(AttrTerm t);
  static AttrTerm sqrt(double v);

  TermOp op() const { return op_; }
  const AttrValue& value() const { return value_; }
  const std::string& name() const { return name_; }
  const Rational& factor() const { return factor_; }
  const std::vector<AttrTerm>& args() const { return args_; }

  bool is_var() const { return op_ == TermOp::Var; }
  bool is_ground() const;
  void collect_vars(std::set<std::string>& out) const;

  friend bool operator==(const AttrTerm&, const AttrTerm&) = default;

 private:
  TermOp op_ = TermOp::Const;
  AttrValue value_;
  std::string name_;
  Rational factor_;
  std::vector<AttrTerm> args_;
};

// Same s-expression shape as the JSON term syntax, used for ordering and display.
std::string render(const AttrTerm& t);
bool operator<(const AttrTerm& a, const AttrTerm& b);
// Structural equality with tolerant numeric constants.
bool approx_equal(const AttrTerm& a, const AttrTerm& b);

// Flattens nested add/mul and sorts their arguments, so that terms equal up to
// associativity and commutativity of add/mul compare equal.
AttrTerm canonical(const AttrTerm& t);

using Substitution = std::map<std::string, AttrValue>;

std::string render(const Substitution& s);

class EvalError : public std::runtime_error {
 public:
  enum class Kind { UnboundVariable, TypeMismatch, DivisionByZero, Domain };
  EvalError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

AttrValue evaluate(const AttrTerm& t, const Substitution& s);

struct AttrMatchOptions {
  // Compound terms whose variables are not yet bound are skipped instead of
  // raising UnboundVariable. The matcher rechecks them once every bare
  // variable of the pattern has a value.
  bool defer_unbound = false;
};

// Every extension of s under which each pattern term evaluates into target.
std::vector<Substitution> match_attr_sets(const std::vector<AttrTerm>& pattern,
                                          const std::vector<AttrValue>& target,
                                          const Substitution& s,
                                          AttrMatchOptions options = {});

bool contains_approx(const std::vector<AttrValue>& set, const AttrValue& v);

AttrTerm rename_vars(const AttrTerm& t, const std::string& suffix);
AttrTerm rename_vars(const AttrTerm& t, const std::map<std::string, std::string>& names);

// Sort and drop (approximate) duplicates. Attribute sets are kept in this form.
template <class A>
void normalize_set(std::vector<A>& set) {
  std::sort(set.begin(), set.end(), [](const A& a, const A& b) { return a < b; });
  std::vector<A> out;
  out.reserve(set.size());
  for (auto& x : set) {
    bool dup = false;
    for (const auto& y : out) {
      if (approx_equal(x, y)) {
        dup = true;
        break;
      }
    }
    if (!dup) out.push_back(std::move(x));
  }
  set = std::move(out);
}

}  // namespace portrewrite
