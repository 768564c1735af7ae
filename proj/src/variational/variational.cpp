#include "gaugelab/variational.hpp"

#include <vector>

#include "gaugelab/calculus.hpp"

namespace gaugelab::variational {

using expr::Var;

std::string_view kind_name(LagrangianKind kind) {
  switch (kind) {
    case LagrangianKind::standard: return "standard";
    case LagrangianKind::non_standard: return "non-standard";
    case LagrangianKind::null: return "null";
    case LagrangianKind::total: return "total";
  }
  return "unknown";
}

Lagrangian Lagrangian::make(Expr body, LagrangianKind kind, std::map<std::string, double> parameters) {
  if (expr::depends_on(body, Var::xddot)) {
    throw std::invalid_argument("Lagrangian must not depend on xddot");
  }
  return Lagrangian{std::move(body), kind, std::move(parameters)};
}

GaugeFunction GaugeFunction::make(Expr body, std::optional<GaugeTriple> triple) {
  if (expr::depends_on(body, Var::xdot) || expr::depends_on(body, Var::xddot)) {
    throw std::invalid_argument("gauge function must depend on x and t only");
  }
  return GaugeFunction{std::move(body), std::move(triple)};
}

Expr EulerLagrange::residual() const { return expr::simplify(A * expr::xddot() + B); }

EulerLagrange euler_lagrange(const Lagrangian& L) {
  const Expr p = expr::simplify(expr::partial(L.body, Var::xdot));
  EulerLagrange el;
  el.A = expr::simplify(expr::partial(p, Var::xdot));
  el.B = expr::simplify(expr::sum({
      expr::xdot() * expr::partial(p, Var::x),
      expr::partial(p, Var::t),
      -expr::partial(L.body, Var::x),
  }));
  return el;
}

Expr energy_function(const Lagrangian& L) {
  return expr::simplify(expr::xdot() * expr::partial(L.body, Var::xdot) - L.body);
}

Expr EnergyRate::residual() const { return expr::sum({energy_rate, explicit_time, -el_work}); }

EnergyRate energy_rate_residual(const Lagrangian& L) {
  EnergyRate r;
  r.energy_rate = expr::total_time_derivative(energy_function(L));
  r.explicit_time = expr::simplify(expr::partial(L.body, Var::t));
  r.el_work = expr::simplify(expr::xdot() * euler_lagrange(L).residual());
  return r;
}

NullVerdict is_null(const Lagrangian& L, const FuzzConfig& cfg) {
  const EulerLagrange el = euler_lagrange(L);
  // Sample on the domain of L itself, not only of A and B.
  const auto guards = expr::singular_subexpressions(L.body);
  const auto a = expr::vanishes(el.A, cfg, guards);
  const auto b = expr::vanishes(el.B, cfg, guards);
  NullVerdict v;
  v.null = a.vanishes && b.vanishes;
  const bool a_worse = a.max_relative >= b.max_relative;
  v.component = a_worse ? "A" : "B";
  v.max_relative = a_worse ? a.max_relative : b.max_relative;
  v.witness = a_worse ? a.witness : b.witness;
  return v;
}

Lagrangian lift_gauge(const GaugeFunction& phi) {
  Expr body = expr::simplify(expr::partial(phi.body, Var::x) * expr::xdot() + expr::partial(phi.body, Var::t));
  return Lagrangian::make(std::move(body), LagrangianKind::null);
}

Expr gauge_energy(const GaugeFunction& phi) { return expr::simplify(-expr::partial(phi.body, Var::t)); }

Expr solve_for_acceleration(const Lagrangian& L, const FuzzConfig& cfg) {
  const EulerLagrange el = euler_lagrange(L);
  const auto guards = expr::singular_subexpressions(L.body);
  if (expr::vanishes(el.A, cfg, guards).vanishes) {
    if (expr::vanishes(el.B, cfg, guards).vanishes) {
      throw DegenerateLagrangianError(DegenerateLagrangianError::Reason::null,
                                      "null Lagrangian: Euler-Lagrange expression vanishes identically");
    }
    throw DegenerateLagrangianError(DegenerateLagrangianError::Reason::constraint,
                                    "degenerate Lagrangian: d2L/dxdot2 vanishes, equation is a constraint");
  }
  return expr::simplify(-el.B / el.A);
}

}  // namespace gaugelab::variational
