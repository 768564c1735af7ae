#include "gaugelab/expr.hpp"

#include <cmath>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <utility>

namespace gaugelab::expr {

std::string_view var_name(Var v) {
  switch (v) {
    case Var::t: return "t";
    case Var::x: return "x";
    case Var::xdot: return "xdot";
    case Var::xddot: return "xddot";
  }
  return "?";
}

Rational Rational::make(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::invalid_argument("rational exponent with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return {num, den};
}

Rational operator+(Rational a, Rational b) {
  return Rational::make(a.num * b.den + b.num * a.den, a.den * b.den);
}

Rational operator*(Rational a, Rational b) { return Rational::make(a.num * b.num, a.den * b.den); }

struct Expr::Node {
  Kind kind = Kind::constant;
  double value = 0.0;
  Var var = Var::t;
  std::string name;
  std::optional<Expr> definition;
  Rational exponent;
  std::vector<Expr> children;
  std::size_t size = 1;
};

Expr::Expr() {
  static const auto zero = [] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::constant;
    n->value = 0.0;
    return std::shared_ptr<const Node>(n);
  }();
  node_ = zero;
}

Expr Expr::constant(double value) {
  if (!std::isfinite(value)) throw std::domain_error("non-finite constant in expression");
  if (value == 0.0) return Expr();
  auto n = std::make_shared<Node>();
  n->kind = Kind::constant;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::variable(Var v) {
  static const auto nodes = [] {
    std::vector<std::shared_ptr<const Node>> out;
    for (Var each : kAllVars) {
      auto n = std::make_shared<Node>();
      n->kind = Kind::variable;
      n->var = each;
      out.push_back(std::move(n));
    }
    return out;
  }();
  return Expr(nodes[static_cast<std::size_t>(v)]);
}

Expr Expr::coefficient(std::string name, Expr definition) {
  for (Var v : {Var::x, Var::xdot, Var::xddot}) {
    if (depends_on(definition, v)) {
      throw std::invalid_argument("coefficient '" + name + "' must be a function of t only");
    }
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::coefficient;
  n->name = std::move(name);
  n->definition = std::move(definition);
  return Expr(std::move(n));
}

Expr Expr::make(Kind kind, std::vector<Expr> children) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  std::size_t size = 1;
  for (const auto& c : children) size += c.size();
  n->size = size;
  n->children = std::move(children);
  return Expr(std::move(n));
}

Kind Expr::kind() const { return node_->kind; }
double Expr::value() const { return node_->value; }
Var Expr::var() const { return node_->var; }
const std::string& Expr::name() const { return node_->name; }
const Expr& Expr::definition() const { return *node_->definition; }
Rational Expr::exponent() const { return node_->exponent; }
std::span<const Expr> Expr::children() const { return node_->children; }
std::size_t Expr::size() const { return node_->size; }

bool operator==(const Expr& a, const Expr& b) {
  return a.node_ == b.node_ || compare(a, b) == 0;
}

int compare(const Expr& a, const Expr& b) {
  if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
  switch (a.kind()) {
    case Kind::constant:
      if (a.value() == b.value()) return 0;
      return a.value() < b.value() ? -1 : 1;
    case Kind::variable:
      if (a.var() == b.var()) return 0;
      return a.var() < b.var() ? -1 : 1;
    case Kind::coefficient:
      if (int c = a.name().compare(b.name()); c != 0) return c < 0 ? -1 : 1;
      return compare(a.definition(), b.definition());
    case Kind::power: {
      const Rational ra = a.exponent();
      const Rational rb = b.exponent();
      if (ra != rb) {
        // Cross-multiplication stays exact for the small exponents in use.
        return ra.num * rb.den < rb.num * ra.den ? -1 : 1;
      }
      break;
    }
    default:
      break;
  }
  const auto ca = a.children();
  const auto cb = b.children();
  if (ca.size() != cb.size()) return ca.size() < cb.size() ? -1 : 1;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    if (int c = compare(ca[i], cb[i]); c != 0) return c;
  }
  return 0;
}

Expr sum(std::vector<Expr> terms) {
  std::vector<Expr> flat;
  flat.reserve(terms.size());
  double folded = 0.0;
  bool any_constant = false;
  for (auto& term : terms) {
    if (term.kind() == Kind::sum) {
      for (const auto& inner : term.children()) {
        if (inner.is_constant()) {
          folded += inner.value();
          any_constant = true;
        } else {
          flat.push_back(inner);
        }
      }
    } else if (term.is_constant()) {
      folded += term.value();
      any_constant = true;
    } else {
      flat.push_back(std::move(term));
    }
  }
  if (any_constant && folded != 0.0) flat.push_back(Expr::constant(folded));
  if (flat.empty()) return Expr();
  if (flat.size() == 1) return flat.front();
  return Expr::make(Kind::sum, std::move(flat));
}

Expr product(std::vector<Expr> factors) {
  std::vector<Expr> flat;
  flat.reserve(factors.size());
  double folded = 1.0;
  auto take = [&](const Expr& f) {
    if (f.is_constant()) {
      folded *= f.value();
    } else {
      flat.push_back(f);
    }
  };
  for (const auto& factor : factors) {
    if (factor.kind() == Kind::product) {
      for (const auto& inner : factor.children()) take(inner);
    } else {
      take(factor);
    }
  }
  if (folded == 0.0) return Expr();
  if (flat.empty()) return Expr::constant(folded);
  if (folded == -1.0) {
    Expr rest = flat.size() == 1 ? flat.front() : Expr::make(Kind::product, std::move(flat));
    return neg(std::move(rest));
  }
  if (folded != 1.0) flat.insert(flat.begin(), Expr::constant(folded));
  if (flat.size() == 1) return flat.front();
  return Expr::make(Kind::product, std::move(flat));
}

Expr quotient(Expr num, Expr den) {
  if (den.is_constant()) {
    if (den.is_zero()) throw std::domain_error("division by constant zero");
    return product({Expr::constant(1.0 / den.value()), std::move(num)});
  }
  if (num.is_zero()) return Expr();
  return Expr::make(Kind::quotient, {std::move(num), std::move(den)});
}

Expr pow(Expr base, Rational exponent) {
  if (exponent.num == 0) return Expr::constant(1.0);
  if (exponent == Rational{1, 1}) return base;
  if (base.is_constant()) {
    const double b = base.value();
    double folded = NAN;
    if (exponent.is_integer()) {
      folded = std::pow(b, static_cast<double>(exponent.num));
    } else if (b > 0.0) {
      folded = std::pow(b, exponent.to_double());
    } else if (b < 0.0 && exponent.den % 2 == 1) {
      folded = -std::pow(-b, exponent.to_double());
      if (exponent.num % 2 == 0) folded = -folded;
    }
    if (std::isfinite(folded)) return Expr::constant(folded);
  }
  if (base.kind() == Kind::power && exponent.is_integer()) {
    return pow(base.child(), base.exponent() * exponent);
  }
  auto n = std::make_shared<Expr::Node>();
  n->kind = Kind::power;
  n->exponent = exponent;
  n->size = 1 + base.size();
  n->children.push_back(std::move(base));
  return Expr(std::move(n));
}

Expr pow(Expr base, std::int64_t exponent) { return pow(std::move(base), Rational{exponent, 1}); }

Expr log_abs(Expr arg) {
  if (arg.is_constant()) {
    if (arg.is_zero()) throw std::domain_error("logarithm of constant zero");
    return Expr::constant(std::log(std::fabs(arg.value())));
  }
  return Expr::make(Kind::log_abs, {std::move(arg)});
}

Expr exp(Expr arg) {
  if (arg.is_constant()) return Expr::constant(std::exp(arg.value()));
  return Expr::make(Kind::exp, {std::move(arg)});
}

Expr sin(Expr arg) {
  if (arg.is_constant()) return Expr::constant(std::sin(arg.value()));
  return Expr::make(Kind::sin, {std::move(arg)});
}

Expr cos(Expr arg) {
  if (arg.is_constant()) return Expr::constant(std::cos(arg.value()));
  return Expr::make(Kind::cos, {std::move(arg)});
}

Expr neg(Expr arg) {
  switch (arg.kind()) {
    case Kind::constant:
      return Expr::constant(-arg.value());
    case Kind::negation:
      return arg.child();
    case Kind::product:
      if (arg.child().is_constant()) {
        std::vector<Expr> factors(arg.children().begin(), arg.children().end());
        factors.front() = Expr::constant(-factors.front().value());
        return product(std::move(factors));
      }
      break;
    default:
      break;
  }
  return Expr::make(Kind::negation, {std::move(arg)});
}

Expr operator+(const Expr& a, const Expr& b) { return sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return sum({a, neg(b)}); }
Expr operator*(const Expr& a, const Expr& b) { return product({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return quotient(a, b); }
Expr operator-(const Expr& a) { return neg(a); }

bool depends_on(const Expr& e, Var v) {
  switch (e.kind()) {
    case Kind::constant: return false;
    case Kind::variable: return e.var() == v;
    case Kind::coefficient: return v == Var::t && depends_on(e.definition(), Var::t);
    default:
      for (const auto& c : e.children()) {
        if (depends_on(c, v)) return true;
      }
      return false;
  }
}

bool references_coefficient(const Expr& e, std::string_view name) {
  if (e.kind() == Kind::coefficient) {
    return e.name() == name || references_coefficient(e.definition(), name);
  }
  for (const auto& c : e.children()) {
    if (references_coefficient(c, name)) return true;
  }
  return false;
}

namespace {

Expr rebuild(const Expr& e, std::vector<Expr> kids) {
  switch (e.kind()) {
    case Kind::sum: return sum(std::move(kids));
    case Kind::product: return product(std::move(kids));
    case Kind::quotient: return quotient(std::move(kids[0]), std::move(kids[1]));
    case Kind::power: return pow(std::move(kids[0]), e.exponent());
    case Kind::log_abs: return log_abs(std::move(kids[0]));
    case Kind::exp: return exp(std::move(kids[0]));
    case Kind::sin: return sin(std::move(kids[0]));
    case Kind::cos: return cos(std::move(kids[0]));
    case Kind::negation: return neg(std::move(kids[0]));
    default: return e;
  }
}

// Record the factor whose zeros make `d` vanish: u rather than u^2, so a
// guard changes sign when the path crosses the zero.
void insert_root(const Expr& d, std::set<Expr, ExprLess>& out) {
  if (d.kind() == Kind::power && d.exponent().num > 0) return insert_root(d.child(), out);
  if (d.kind() == Kind::product) {
    for (const auto& c : d.children()) insert_root(c, out);
    return;
  }
  if (d.kind() == Kind::constant) return;
  out.insert(d);
}

void collect_singular(const Expr& e, std::set<Expr, ExprLess>& out) {
  switch (e.kind()) {
    case Kind::quotient:
      insert_root(e.child(1), out);
      break;
    case Kind::log_abs:
      insert_root(e.child(), out);
      break;
    case Kind::power:
      if (e.exponent().num < 0 || !e.exponent().is_integer()) insert_root(e.child(), out);
      break;
    case Kind::coefficient:
      collect_singular(e.definition(), out);
      return;
    default:
      break;
  }
  for (const auto& c : e.children()) collect_singular(c, out);
}

}  // namespace

Expr transform(const Expr& e, const std::function<Expr(const Expr&)>& fn) {
  if (e.children().empty()) return fn(e);
  std::vector<Expr> kids;
  kids.reserve(e.children().size());
  for (const auto& c : e.children()) kids.push_back(transform(c, fn));
  return fn(rebuild(e, std::move(kids)));
}

// Only the original leaves are replaced: a rebuilt node may normalize back
// to a bare variable, e.g. (xdot - 1) + 1, and must not be substituted twice.
Expr substitute(const Expr& e, const std::function<Expr(Var)>& replacement) {
  if (e.kind() == Kind::variable) return replacement(e.var());
  if (e.children().empty()) return e;
  std::vector<Expr> kids;
  kids.reserve(e.children().size());
  for (const auto& c : e.children()) kids.push_back(substitute(c, replacement));
  return rebuild(e, std::move(kids));
}

std::vector<Expr> singular_subexpressions(const Expr& e) {
  std::set<Expr, ExprLess> found;
  collect_singular(e, found);
  return {found.begin(), found.end()};
}

}  // namespace gaugelab::expr
