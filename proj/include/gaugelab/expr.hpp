// Immutable symbolic expression trees over t, x, xdot, xddot and named
// time-dependent coefficient functions.
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gaugelab::expr {

enum class Var : std::uint8_t { t, x, xdot, xddot };

inline constexpr Var kAllVars[] = {Var::t, Var::x, Var::xdot, Var::xddot};

std::string_view var_name(Var v);

enum class Kind : std::uint8_t {
  constant,
  variable,
  coefficient,
  sum,
  product,
  quotient,
  power,
  log_abs,
  exp,
  sin,
  cos,
  negation,
};

/// Exponent of a power node. Always normalized: den > 0, gcd(num, den) = 1.
struct Rational {
  std::int64_t num = 1;
  std::int64_t den = 1;

  static Rational make(std::int64_t num, std::int64_t den);
  bool is_integer() const { return den == 1; }
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

Rational operator+(Rational a, Rational b);
Rational operator*(Rational a, Rational b);

/// Value-semantic handle to a shared, immutable node.
///
/// All construction goes through the factory functions below, which apply a
/// small fixed set of normalizations (flattening, identity elements, constant
/// folding). The printer and parser rely on those normalizations to make
/// print -> parse a structural round trip.
class Expr {
 public:
  /// The constant 0.
  Expr();

  static Expr constant(double value);
  static Expr variable(Var v);
  /// Coefficient function of time. `definition` must depend on t only.
  static Expr coefficient(std::string name, Expr definition);

  Kind kind() const;
  double value() const;              // constant
  Var var() const;                   // variable
  const std::string& name() const;   // coefficient
  const Expr& definition() const;    // coefficient
  Rational exponent() const;         // power
  std::span<const Expr> children() const;
  const Expr& child(std::size_t i = 0) const { return children()[i]; }

  bool is_constant() const { return kind() == Kind::constant; }
  bool is_constant(double v) const { return is_constant() && value() == v; }
  bool is_zero() const { return is_constant(0.0); }
  bool is_one() const { return is_constant(1.0); }

  /// Number of nodes in the tree (coefficient definitions not counted).
  std::size_t size() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Expr make(Kind kind, std::vector<Expr> children);

  std::shared_ptr<const Node> node_;

  friend Expr sum(std::vector<Expr> terms);
  friend Expr product(std::vector<Expr> factors);
  friend Expr quotient(Expr num, Expr den);
  friend Expr pow(Expr base, Rational exponent);
  friend Expr log_abs(Expr arg);
  friend Expr exp(Expr arg);
  friend Expr sin(Expr arg);
  friend Expr cos(Expr arg);
  friend Expr neg(Expr arg);
};

/// Total structural order; consistent with operator==.
int compare(const Expr& a, const Expr& b);

struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

Expr sum(std::vector<Expr> terms);
Expr product(std::vector<Expr> factors);
Expr quotient(Expr num, Expr den);
Expr pow(Expr base, Rational exponent);
Expr pow(Expr base, std::int64_t exponent);
Expr log_abs(Expr arg);
Expr exp(Expr arg);
Expr sin(Expr arg);
Expr cos(Expr arg);
Expr neg(Expr arg);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

inline Expr constant(double v) { return Expr::constant(v); }
inline Expr var(Var v) { return Expr::variable(v); }
inline Expr t() { return var(Var::t); }
inline Expr x() { return var(Var::x); }
inline Expr xdot() { return var(Var::xdot); }
inline Expr xddot() { return var(Var::xddot); }

/// True if the tree references `v`. Coefficient functions count as
/// depending on t.
bool depends_on(const Expr& e, Var v);

/// True if the tree contains any coefficient named `name`.
bool references_coefficient(const Expr& e, std::string_view name);

/// Replace variables by expressions. Coefficient functions are atoms and are
/// left untouched (their definitions are in t, which is never remapped by the
/// callers in this project; remapping t is rejected).
Expr substitute(const Expr& e, const std::function<Expr(Var)>& replacement);

/// Rebuild `e` bottom-up applying `fn` to each rebuilt node.
Expr transform(const Expr& e, const std::function<Expr(const Expr&)>& fn);

/// Every subexpression whose vanishing makes `e` singular: quotient
/// denominators, log arguments, bases of negative or fractional powers.
/// Coefficient definitions are included. Deduplicated, structurally ordered.
std::vector<Expr> singular_subexpressions(const Expr& e);

}  // namespace gaugelab::expr
