#include "gaugelab/evaluate.hpp"

#include <cmath>

#include "gaugelab/parser.hpp"

namespace gaugelab::expr {

double Binding::at(Var v) const {
  const auto value = get(v);
  if (!value) throw UnboundSymbolError(std::string(var_name(v)));
  return *value;
}

namespace {

[[noreturn]] void singular(const char* what, const Expr& sub) {
  throw SingularPointError(what, to_string(sub));
}

double real_power(double base, Rational r, const Expr& node) {
  if (r.is_integer()) {
    if (base == 0.0 && r.num < 0) singular("division by zero", node.child());
    return std::pow(base, static_cast<double>(r.num));
  }
  if (base < 0.0) {
    if (r.den % 2 == 0) singular("even root of a negative value", node.child());
    const double mag = std::pow(-base, r.to_double());
    return r.num % 2 == 0 ? mag : -mag;
  }
  if (base == 0.0 && r.num < 0) singular("division by zero", node.child());
  return std::pow(base, r.to_double());
}

Evaluated eval(const Expr& e, const Binding& b) {
  switch (e.kind()) {
    case Kind::constant:
      return {e.value(), std::fabs(e.value())};
    case Kind::variable: {
      const double v = b.at(e.var());
      return {v, std::fabs(v)};
    }
    case Kind::coefficient: {
      if (auto it = b.coefficients.find(e.name()); it != b.coefficients.end()) {
        return {it->second, std::fabs(it->second)};
      }
      const double v = eval(e.definition(), b).value;
      return {v, std::fabs(v)};
    }
    case Kind::sum: {
      Evaluated out;
      for (const auto& c : e.children()) {
        const auto r = eval(c, b);
        out.value += r.value;
        out.magnitude += r.magnitude;
      }
      return out;
    }
    case Kind::product: {
      Evaluated out{1.0, 1.0};
      for (const auto& c : e.children()) {
        const auto r = eval(c, b);
        out.value *= r.value;
        out.magnitude *= r.magnitude;
      }
      return out;
    }
    case Kind::quotient: {
      const auto n = eval(e.child(0), b);
      const auto d = eval(e.child(1), b);
      if (d.value == 0.0) singular("division by zero", e.child(1));
      const double ad = std::fabs(d.value);
      return {n.value / d.value, n.magnitude / ad + std::fabs(n.value) * d.magnitude / (ad * ad)};
    }
    case Kind::power: {
      const auto u = eval(e.child(), b);
      const Rational r = e.exponent();
      const double v = real_power(u.value, r, e);
      double mag = std::fabs(v);
      if (u.value != 0.0) mag += std::fabs(r.to_double() * v / u.value) * u.magnitude;
      return {v, mag};
    }
    case Kind::log_abs: {
      const auto u = eval(e.child(), b);
      if (u.value == 0.0) singular("logarithm of zero", e.child());
      const double v = std::log(std::fabs(u.value));
      return {v, std::fabs(v) + u.magnitude / std::fabs(u.value)};
    }
    case Kind::exp: {
      const auto u = eval(e.child(), b);
      const double v = std::exp(u.value);
      return {v, v * (1.0 + u.magnitude)};
    }
    case Kind::sin: {
      const auto u = eval(e.child(), b);
      const double v = std::sin(u.value);
      return {v, std::fabs(v) + u.magnitude};
    }
    case Kind::cos: {
      const auto u = eval(e.child(), b);
      const double v = std::cos(u.value);
      return {v, std::fabs(v) + u.magnitude};
    }
    case Kind::negation: {
      const auto u = eval(e.child(), b);
      return {-u.value, u.magnitude};
    }
  }
  return {};
}

}  // namespace

Evaluated evaluate_with_magnitude(const Expr& e, const Binding& b) {
  Evaluated r = eval(e, b);
  if (!std::isfinite(r.value)) singular("non-finite value", e);
  return r;
}

double evaluate(const Expr& e, const Binding& b) { return evaluate_with_magnitude(e, b).value; }

}  // namespace gaugelab::expr
