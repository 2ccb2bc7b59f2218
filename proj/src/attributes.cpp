#include "portrewrite/attributes.hpp"

#include <charconv>
#include <cmath>
#include <numeric>

namespace portrewrite {

namespace {

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

[[noreturn]] void mismatch(const std::string& what) {
  throw EvalError(EvalError::Kind::TypeMismatch, "type mismatch: " + what);
}

AttrValue checked(AttrValue v) {
  auto finite = [](double d) { return std::isfinite(d); };
  if (v.kind() == AttrKind::Number && !finite(v.as_number()))
    throw EvalError(EvalError::Kind::Domain, "non-finite result");
  if (v.kind() == AttrKind::Vector && (!finite(v.as_vector().x) || !finite(v.as_vector().y)))
    throw EvalError(EvalError::Kind::Domain, "non-finite result");
  return v;
}

AttrValue plus(const AttrValue& a, const AttrValue& b, double sign) {
  if (a.kind() == AttrKind::Number && b.kind() == AttrKind::Number)
    return AttrValue::number(a.as_number() + sign * b.as_number());
  if (a.kind() == AttrKind::Vector && b.kind() == AttrKind::Vector) {
    Vec2 x = a.as_vector(), y = b.as_vector();
    return AttrValue::vector(x.x + sign * y.x, x.y + sign * y.y);
  }
  mismatch(to_string(a) + (sign > 0 ? " + " : " - ") + to_string(b));
}

AttrValue times(const AttrValue& a, const AttrValue& b) {
  if (a.kind() == AttrKind::Number && b.kind() == AttrKind::Number)
    return AttrValue::number(a.as_number() * b.as_number());
  if (a.kind() == AttrKind::Number && b.kind() == AttrKind::Vector) {
    Vec2 v = b.as_vector();
    return AttrValue::vector(a.as_number() * v.x, a.as_number() * v.y);
  }
  if (a.kind() == AttrKind::Vector && b.kind() == AttrKind::Number) return times(b, a);
  mismatch(to_string(a) + " * " + to_string(b));
}

bool equal_for_test(const AttrValue& a, const AttrValue& b) {
  if (a.kind() != b.kind()) return false;
  return approx_equal(a, b);
}

}  // namespace

AttrValue AttrValue::number(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("attribute numbers must be finite");
  AttrValue out;
  out.v_ = v;
  return out;
}

AttrValue AttrValue::tag(std::string t) {
  if (t.empty()) throw std::invalid_argument("attribute tags must be non-empty");
  AttrValue out;
  out.v_ = std::move(t);
  return out;
}

AttrValue AttrValue::vector(double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y))
    throw std::invalid_argument("vector components must be finite");
  AttrValue out;
  out.v_ = Vec2{x, y};
  return out;
}

double AttrValue::as_number() const {
  if (kind() != AttrKind::Number) throw std::logic_error("attribute is not a number");
  return std::get<double>(v_);
}

const std::string& AttrValue::as_tag() const {
  if (kind() != AttrKind::Tag) throw std::logic_error("attribute is not a tag");
  return std::get<std::string>(v_);
}

Vec2 AttrValue::as_vector() const {
  if (kind() != AttrKind::Vector) throw std::logic_error("attribute is not a vector");
  return std::get<Vec2>(v_);
}

bool approx_equal(double a, double b) {
  double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
  return std::fabs(a - b) <= kEpsilon * scale;
}

bool approx_equal(const AttrValue& a, const AttrValue& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case AttrKind::Number:
      return approx_equal(a.as_number(), b.as_number());
    case AttrKind::Tag:
      return a.as_tag() == b.as_tag();
    case AttrKind::Vector:
      return approx_equal(a.as_vector().x, b.as_vector().x) &&
             approx_equal(a.as_vector().y, b.as_vector().y);
  }
  return false;
}

bool operator<(const AttrValue& a, const AttrValue& b) {
  if (a.kind() != b.kind()) return a.kind() < b.kind();
  switch (a.kind()) {
    case AttrKind::Number:
      return a.as_number() < b.as_number();
    case AttrKind::Tag:
      return a.as_tag() < b.as_tag();
    case AttrKind::Vector: {
      Vec2 x = a.as_vector(), y = b.as_vector();
      return x.x != y.x ? x.x < y.x : x.y < y.y;
    }
  }
  return false;
}

std::string to_string(const AttrValue& v) {
  switch (v.kind()) {
    case AttrKind::Number:
      return format_number(v.as_number());
    case AttrKind::Tag:
      return quote(v.as_tag());
    case AttrKind::Vector:
      return "[" + format_number(v.as_vector().x) + "," + format_number(v.as_vector().y) + "]";
  }
  return {};
}

Rational Rational::parse(const std::string& text) {
  auto read = [&](const std::string& part) {
    std::int64_t v = 0;
    auto res = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || res.ec != std::errc() || res.ptr != part.data() + part.size())
      throw std::invalid_argument("bad rational '" + text + "'");
    return v;
  };
  Rational r;
  auto slash = text.find('/');
  if (slash == std::string::npos) {
    r.num = read(text);
    r.den = 1;
  } else {
    r.num = read(text.substr(0, slash));
    r.den = read(text.substr(slash + 1));
  }
  if (r.den == 0) throw std::invalid_argument("rational with zero denominator '" + text + "'");
  if (r.den < 0) {
    r.num = -r.num;
    r.den = -r.den;
  }
  auto g = std::gcd(r.num, r.den);
  if (g > 1) {
    r.num /= g;
    r.den /= g;
  }
  return r;
}

std::string Rational::str() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

AttrTerm AttrTerm::constant(AttrValue v) {
  AttrTerm t;
  t.op_ = TermOp::Const;
  t.value_ = std::move(v);
  return t;
}

AttrTerm AttrTerm::var(std::string name) {
  if (name.empty()) throw std::invalid_argument("empty variable name");
  AttrTerm t;
  t.op_ = TermOp::Var;
  t.name_ = std::move(name);
  return t;
}

AttrTerm AttrTerm::add(std::vector<AttrTerm> args) {
  if (args.empty()) throw std::invalid_argument("add needs at least one argument");
  AttrTerm t;
  t.op_ = TermOp::Add;
  t.args_ = std::move(args);
  return t;
}

AttrTerm AttrTerm::sub(AttrTerm a, AttrTerm b) {
  AttrTerm t;
  t.op_ = TermOp::Sub;
  t.args_ = {std::move(a), std::move(b)};
  return t;
}

AttrTerm AttrTerm::mul(std::vector<AttrTerm> args) {
  if (args.empty()) throw std::invalid_argument("mul needs at least one argument");
  AttrTerm t;
  t.op_ = TermOp::Mul;
  t.args_ = std::move(args);
  return t;
}

AttrTerm AttrTerm::div(AttrTerm a, AttrTerm b) {
  AttrTerm t;
  t.op_ = TermOp::Div;
  t.args_ = {std::move(a), std::move(b)};
  return t;
}

AttrTerm AttrTerm::scale(Rational factor, AttrTerm x) {
  if (factor.den <= 0) throw std::invalid_argument("bad scale factor");
  AttrTerm t;
  t.op_ = TermOp::Scale;
  t.factor_ = factor;
  t.args_ = {std::move(x)};
  return t;
}

AttrTerm AttrTerm::eq(AttrTerm a, AttrTerm b) {
  AttrTerm t;
  t.op_ = TermOp::Eq;
  t.args_ = {std::move(a), std::move(b)};
  return t;
}

AttrTerm AttrTerm::vec(AttrTerm x, AttrTerm y) {
  AttrTerm t;
  t.op_ = TermOp::Vec;
  t.args_ = {std::move(x), std::move(y)};
  return t;
}

AttrTerm AttrTerm::perp(AttrTerm x) {
  AttrTerm t;
  t.op_ = TermOp::Perp;
  t.args_ = {std::move(x)};
  return t;
}

AttrTerm AttrTerm::sqrt(double v) {
  AttrTerm t;
  t.op_ = TermOp::Sqrt;
  t.value_ = AttrValue::number(v);
  return t;
}

bool AttrTerm::is_ground() const {
  if (op_ == TermOp::Var) return false;
  for (const auto& a : args_)
    if (!a.is_ground()) return false;
  return true;
}

void AttrTerm::collect_vars(std::set<std::string>& out) const {
  if (op_ == TermOp::Var) out.insert(name_);
  for (const auto& a : args_) a.collect_vars(out);
}

std::string render(const AttrTerm& t) {
  auto list = [&](const char* op) {
    std::string s = "[\"";
    s += op;
    s += '"';
    for (const auto& a : t.args()) s += "," + render(a);
    return s + "]";
  };
  switch (t.op()) {
    case TermOp::Const:
      return to_string(t.value());
    case TermOp::Var:
      return "[\"var\"," + quote(t.name()) + "]";
    case TermOp::Add:
      return list("add");
    case TermOp::Sub:
      return list("sub");
    case TermOp::Mul:
      return list("mul");
    case TermOp::Div:
      return list("div");
    case TermOp::Scale:
      return "[\"scale\",\"" + t.factor().str() + "\"," + render(t.args()[0]) + "]";
    case TermOp::Eq:
      return list("eq");
    case TermOp::Vec:
      return list("vec");
    case TermOp::Perp:
      return list("perp");
    case TermOp::Sqrt:
      return "[\"sqrt\"," + format_number(t.value().as_number()) + "]";
  }
  return {};
}

bool operator<(const AttrTerm& a, const AttrTerm& b) {
  if (a.op() == TermOp::Const && b.op() == TermOp::Const) return a.value() < b.value();
  return render(a) < render(b);
}

bool approx_equal(const AttrTerm& a, const AttrTerm& b) {
  if (a.op() != b.op() || a.args().size() != b.args().size()) return false;
  switch (a.op()) {
    case TermOp::Const:
    case TermOp::Sqrt:
      return approx_equal(a.value(), b.value());
    case TermOp::Var:
      return a.name() == b.name();
    case TermOp::Scale:
      if (!(a.factor() == b.factor())) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < a.args().size(); ++i)
    if (!approx_equal(a.args()[i], b.args()[i])) return false;
  return true;
}

AttrTerm canonical(const AttrTerm& t) {
  switch (t.op()) {
    case TermOp::Const:
    case TermOp::Var:
    case TermOp::Sqrt:
      return t;
    default:
      break;
  }
  std::vector<AttrTerm> args;
  for (const auto& a : t.args()) {
    AttrTerm c = canonical(a);
    bool flatten = (t.op() == TermOp::Add || t.op() == TermOp::Mul) && c.op() == t.op();
    if (flatten)
      args.insert(args.end(), c.args().begin(), c.args().end());
    else
      args.push_back(std::move(c));
  }
  switch (t.op()) {
    case TermOp::Add:
    case TermOp::Mul:
    case TermOp::Eq: {
      std::vector<std::pair<std::string, AttrTerm>> keyed;
      for (auto& a : args) keyed.emplace_back(render(a), std::move(a));
      std::sort(keyed.begin(), keyed.end(),
                [](const auto& x, const auto& y) { return x.first < y.first; });
      args.clear();
      for (auto& k : keyed) args.push_back(std::move(k.second));
      if (t.op() == TermOp::Add) return AttrTerm::add(std::move(args));
      if (t.op() == TermOp::Mul) return AttrTerm::mul(std::move(args));
      return AttrTerm::eq(std::move(args[0]), std::move(args[1]));
    }
    case TermOp::Sub:
      return AttrTerm::sub(std::move(args[0]), std::move(args[1]));
    case TermOp::Div:
      return AttrTerm::div(std::move(args[0]), std::move(args[1]));
    case TermOp::Scale:
      return AttrTerm::scale(t.factor(), std::move(args[0]));
    case TermOp::Vec:
      return AttrTerm::vec(std::move(args[0]), std::move(args[1]));
    case TermOp::Perp:
      return AttrTerm::perp(std::move(args[0]));
    default:
      return t;
  }
}

std::string render(const Substitution& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& [k, v] : s) {
    if (!first) out += ",";
    first = false;
    out += quote(k) + ":" + to_string(v);
  }
  return out + "}";
}

AttrValue evaluate(const AttrTerm& t, const Substitution& s) {
  const auto& args = t.args();
  switch (t.op()) {
    case TermOp::Const:
      return t.value();
    case TermOp::Var: {
      auto it = s.find(t.name());
      if (it == s.end())
        throw EvalError(EvalError::Kind::UnboundVariable, "unbound variable '" + t.name() + "'");
      return it->second;
    }
    case TermOp::Add: {
      AttrValue acc = evaluate(args[0], s);
      if (acc.kind() == AttrKind::Tag && args.size() == 1) mismatch("tag in arithmetic");
      for (std::size_t i = 1; i < args.size(); ++i) acc = plus(acc, evaluate(args[i], s), 1.0);
      return checked(acc);
    }
    case TermOp::Sub:
      return checked(plus(evaluate(args[0], s), evaluate(args[1], s), -1.0));
    case TermOp::Mul: {
      AttrValue acc = evaluate(args[0], s);
      if (acc.kind() == AttrKind::Tag) mismatch("tag in arithmetic");
      for (std::size_t i = 1; i < args.size(); ++i) acc = times(acc, evaluate(args[i], s));
      return checked(acc);
    }
    case TermOp::Div: {
      AttrValue a = evaluate(args[0], s), b = evaluate(args[1], s);
      if (b.kind() != AttrKind::Number || a.kind() == AttrKind::Tag)
        mismatch(to_string(a) + " / " + to_string(b));
      if (b.as_number() == 0.0) throw EvalError(EvalError::Kind::DivisionByZero, "division by zero");
      return checked(times(AttrValue::number(1.0 / b.as_number()), a));
    }
    case TermOp::Scale: {
      AttrValue a = evaluate(args[0], s);
      if (a.kind() == AttrKind::Tag) mismatch("scale of a tag");
      return checked(times(AttrValue::number(t.factor().value()), a));
    }
    case TermOp::Eq:
      return AttrValue::number(equal_for_test(evaluate(args[0], s), evaluate(args[1], s)) ? 1.0 : 0.0);
    case TermOp::Vec: {
      AttrValue x = evaluate(args[0], s), y = evaluate(args[1], s);
      if (x.kind() != AttrKind::Number || y.kind() != AttrKind::Number)
        mismatch("vec of non-numbers");
      return AttrValue::vector(x.as_number(), y.as_number());
    }
    case TermOp::Perp: {
      AttrValue v = evaluate(args[0], s);
      if (v.kind() != AttrKind::Vector) mismatch("perp of a non-vector");
      return AttrValue::vector(-v.as_vector().y, v.as_vector().x);
    }
    case TermOp::Sqrt: {
      double v = t.value().as_number();
      if (v < 0) throw EvalError(EvalError::Kind::Domain, "sqrt of a negative number");
      return AttrValue::number(std::sqrt(v));
    }
  }
  return t.value();
}

bool contains_approx(const std::vector<AttrValue>& set, const AttrValue& v) {
  for (const auto& x : set)
    if (approx_equal(x, v)) return true;
  return false;
}

namespace {

bool all_bound(const AttrTerm& t, const Substitution& s) {
  if (t.is_var()) return s.count(t.name()) > 0;
  for (const auto& a : t.args())
    if (!all_bound(a, s)) return false;
  return true;
}

void match_rec(const std::vector<const AttrTerm*>& order, std::size_t i,
               const std::vector<AttrValue>& target, Substitution& s, AttrMatchOptions options,
               std::vector<Substitution>& out) {
  if (i == order.size()) {
    out.push_back(s);
    return;
  }
  const AttrTerm& t = *order[i];
  if (t.is_var() && !s.count(t.name())) {
    for (const auto& v : target) {
      s.emplace(t.name(), v);
      match_rec(order, i + 1, target, s, options, out);
      s.erase(t.name());
    }
    return;
  }
  if (!all_bound(t, s)) {
    if (!options.defer_unbound)
      throw EvalError(EvalError::Kind::UnboundVariable,
                      "pattern term " + render(t) + " has unbound variables");
    match_rec(order, i + 1, target, s, options, out);
    return;
  }
  try {
    if (!contains_approx(target, evaluate(t, s))) return;
  } catch (const EvalError&) {
    return;
  }
  match_rec(order, i + 1, target, s, options, out);
}

}  // namespace

std::vector<Substitution> match_attr_sets(const std::vector<AttrTerm>& pattern,
                                          const std::vector<AttrValue>& target,
                                          const Substitution& s, AttrMatchOptions options) {
  // Bare variables bind first so that compound terms can use them.
  std::vector<const AttrTerm*> order;
  for (const auto& t : pattern)
    if (t.is_var()) order.push_back(&t);
  for (const auto& t : pattern)
    if (!t.is_var()) order.push_back(&t);
  std::vector<Substitution> out;
  Substitution work = s;
  match_rec(order, 0, target, work, options, out);
  return out;
}

namespace {

template <class F>
AttrTerm map_vars(const AttrTerm& t, const F& rename) {
  if (t.is_var()) return AttrTerm::var(rename(t.name()));
  if (t.args().empty()) return t;
  std::vector<AttrTerm> args;
  for (const auto& a : t.args()) args.push_back(map_vars(a, rename));
  switch (t.op()) {
    case TermOp::Add: return AttrTerm::add(std::move(args));
    case TermOp::Mul: return AttrTerm::mul(std::move(args));
    case TermOp::Sub: return AttrTerm::sub(args[0], args[1]);
    case TermOp::Div: return AttrTerm::div(args[0], args[1]);
    case TermOp::Scale: return AttrTerm::scale(t.factor(), args[0]);
    case TermOp::Eq: return AttrTerm::eq(args[0], args[1]);
    case TermOp::Vec: return AttrTerm::vec(args[0], args[1]);
    case TermOp::Perp: return AttrTerm::perp(args[0]);
    default: return t;
  }
}

}  // namespace

AttrTerm rename_vars(const AttrTerm& t, const std::string& suffix) {
  return map_vars(t, [&](const std::string& n) { return n + suffix; });
}

AttrTerm rename_vars(const AttrTerm& t, const std::map<std::string, std::string>& names) {
  return map_vars(t, [&](const std::string& n) {
    auto it = names.find(n);
    return it == names.end() ? n : it->second;
  });
}

}  // namespace portrewrite
