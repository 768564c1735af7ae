#pragma once

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "gaugelab/expr.hpp"

namespace gaugelab::expr {

/// Values for the four variables plus optional coefficient overrides.
/// Coefficients without an override are evaluated from their definition.
struct Binding {
  std::array<std::optional<double>, 4> vars{};
  std::map<std::string, double, std::less<>> coefficients;

  Binding() = default;
  Binding(double t, double x, double xdot, double xddot) {
    set(Var::t, t);
    set(Var::x, x);
    set(Var::xdot, xdot);
    set(Var::xddot, xddot);
  }

  Binding& set(Var v, double value) {
    vars[static_cast<std::size_t>(v)] = value;
    return *this;
  }
  std::optional<double> get(Var v) const { return vars[static_cast<std::size_t>(v)]; }
  double at(Var v) const;
};

class UnboundSymbolError : public std::runtime_error {
 public:
  explicit UnboundSymbolError(const std::string& symbol)
      : std::runtime_error("unbound symbol '" + symbol + "'"), symbol_(symbol) {}
  const std::string& symbol() const { return symbol_; }

 private:
  std::string symbol_;
};

/// Division by zero, log of zero, or a real root of a negative number.
class SingularPointError : public std::runtime_error {
 public:
  SingularPointError(const std::string& what, std::string subexpression)
      : std::runtime_error(what + ": " + subexpression), subexpression_(std::move(subexpression)) {}
  const std::string& subexpression() const { return subexpression_; }

 private:
  std::string subexpression_;
};

double evaluate(const Expr& e, const Binding& b);

/// Value together with a first-order bound on the magnitudes that took part
/// in computing it. Rounding error of the value is O(eps * magnitude), so
/// |value| / magnitude is the meaningful "relative size" of a quantity that
/// should cancel to zero.
struct Evaluated {
  double value = 0.0;
  double magnitude = 0.0;
};

Evaluated evaluate_with_magnitude(const Expr& e, const Binding& b);

}  // namespace gaugelab::expr
