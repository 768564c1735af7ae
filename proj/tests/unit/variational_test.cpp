#include <gtest/gtest.h>

#include <cmath>

#include "corpus.hpp"
#include "gaugelab/calculus.hpp"
#include "gaugelab/catalog.hpp"
#include "gaugelab/parser.hpp"
#include "gaugelab/variational.hpp"

using namespace gaugelab;
using expr::Binding;
using expr::Expr;
using expr::FuzzConfig;
using expr::parse;
using expr::Var;
using variational::LagrangianKind;

namespace {

variational::Lagrangian lag(std::string_view text, LagrangianKind kind = LagrangianKind::non_standard) {
  return variational::Lagrangian::make(parse(text), kind);
}

// EL residual computed from L alone by nested central differences along the
// straight path through (t, x, xdot, xddot). Independent of the symbolic code.
double numeric_el(const Expr& L, const Binding& b) {
  const double t0 = b.at(Var::t), x0 = b.at(Var::x), v0 = b.at(Var::xdot), a0 = b.at(Var::xddot);
  auto Lat = [&](double t, double x, double v) { return expr::evaluate(L, Binding(t, x, v, 0.0)); };
  const double hv = 1e-4;
  auto dL_dv = [&](double t, double x, double v) { return (Lat(t, x, v + hv) - Lat(t, x, v - hv)) / (2 * hv); };
  const double ht = 1e-4;
  // Path x(s) = x0 + v0 s + a0 s^2 / 2 around s = 0.
  auto p = [&](double s) {
    return dL_dv(t0 + s, x0 + v0 * s + 0.5 * a0 * s * s, v0 + a0 * s);
  };
  const double ddt = (p(ht) - p(-ht)) / (2 * ht);
  const double hx = 1e-5;
  const double dL_dx = (Lat(t0, x0 + hx, v0) - Lat(t0, x0 - hx, v0)) / (2 * hx);
  return ddt - dL_dx;
}

}  // namespace

TEST(Lagrangian, RejectsAcceleration) {
  EXPECT_THROW(lag("xddot*x"), std::invalid_argument);
  EXPECT_THROW(variational::GaugeFunction::make(parse("x*xdot")), std::invalid_argument);
}

TEST(EulerLagrange, StandardInertiaGivesAcceleration) {
  const auto el = variational::euler_lagrange(catalog::standard_inertia());
  EXPECT_EQ(el.A, expr::constant(1.0));
  EXPECT_TRUE(el.B.is_zero());
  EXPECT_EQ(el.residual(), expr::xddot());
}

TEST(EulerLagrange, BasicNullLagrangianVanishes) {
  expr::SymbolTable s;
  s.define("a1", "1.5");
  s.define("a2", "2");
  s.define("a4", "0.5");
  const auto L = variational::Lagrangian::make(parse("a1*xdot/(a2*x + a4)", s), LagrangianKind::null);
  const auto el = variational::euler_lagrange(L);
  EXPECT_TRUE(expr::vanishes(el.A).vanishes);
  EXPECT_TRUE(expr::vanishes(el.B).vanishes);
}

TEST(EulerLagrange, InertiaSetOneGivesCubicDenominator) {
  const auto set = catalog::CoefficientSet::inertia_1(1.0, 1.0, 1.0, 1.0);
  const auto el = variational::euler_lagrange(catalog::nsl_general(set));
  const Expr expected = parse("2/(C1*(f*xdot - a_o*x + C2)^3)", set.symbols);
  EXPECT_TRUE(expr::equivalent(el.A, expected).equivalent);
  EXPECT_LT(expr::vanishes(el.B).max_relative, 1e-9);
}

TEST(EulerLagrange, MatchesFiniteDifferenceOracle) {
  expr::SymbolTable s;
  s.define("g1", "1 + t^2");
  s.define("g2", "sin(t)");
  s.define("g3", "2 + cos(t)");
  const std::vector<Expr> bodies = {
      parse("xdot^2/2 - x^2/2"),
      parse("1/(g1*xdot + g2*x + g3)", s),
      parse("exp(t)*xdot^2*x + sin(x)*t"),
      parse("xdot^3/(1 + x^2)"),
  };
  FuzzConfig cfg;
  cfg.samples = 100;
  for (const auto& body : bodies) {
    const auto el = variational::euler_lagrange(variational::Lagrangian::make(body, LagrangianKind::standard));
    const Expr r = el.residual();
    // Keep the finite-difference stencil away from the poles.
    FuzzConfig c = cfg;
    c.delta = 0.3;
    expr::for_each_sample(c, expr::singular_subexpressions(body), [&](const Binding& b) {
      const double sym = expr::evaluate(r, b);
      const double num = numeric_el(body, b);
      EXPECT_LT(std::fabs(sym - num) / std::max(1.0, std::fabs(sym)), 1e-4) << expr::to_string(body);
    });
  }
}

TEST(EulerLagrange, AffineInAcceleration) {
  const auto L = catalog::nsl_general(catalog::CoefficientSet::custom(parse("t"), parse("1"), parse("0")));
  const auto el = variational::euler_lagrange(L);
  EXPECT_FALSE(expr::depends_on(el.A, Var::xddot));
  EXPECT_FALSE(expr::depends_on(el.B, Var::xddot));
}

TEST(Energy, Examples) {
  EXPECT_EQ(variational::energy_function(catalog::standard_inertia()), parse("xdot^2/2"));
  const auto phi = variational::GaugeFunction::make(parse("x*t"));
  EXPECT_EQ(variational::gauge_energy(phi), -expr::x());
  EXPECT_TRUE(variational::gauge_energy(catalog::null_basic(2, 1, 3).gauge).is_zero());
}

TEST(Energy, LiftedGaugeEnergyIsMinusExplicitTimeDerivative) {
  for (const auto& phi : corpus::gauges(10, 7)) {
    const Expr lhs = variational::energy_function(variational::lift_gauge(phi));
    const auto v = expr::equivalent(lhs, variational::gauge_energy(phi), FuzzConfig{}.with_epsilon(1e-10));
    EXPECT_TRUE(v.equivalent) << expr::to_string(phi.body) << " residual " << v.max_residual;
    EXPECT_FALSE(expr::depends_on(variational::gauge_energy(phi), Var::xdot));
  }
}

TEST(EnergyRate, IdentityHolds) {
  std::vector<variational::Lagrangian> ls = {
      catalog::standard_inertia(),
      catalog::nsl_general(catalog::CoefficientSet::inertia_1(1, 1, 1, 1)),
      catalog::nsl_general(catalog::CoefficientSet::inertia_1(0.7, -0.4, 1.3, 0.2)),
      catalog::nsl_general(catalog::CoefficientSet::inertia_2(1)),
      catalog::null_basic(1, 2, 3).lagrangian,
      lag("exp(t)*xdot^2*x + sin(x)*t"),
  };
  ls.push_back(variational::lift_gauge(catalog::gauge_general(parse("t"), parse("1 + t^2"), parse("sin(t)"))));
  for (const auto& L : ls) {
    const auto r = variational::energy_rate_residual(L);
    const auto v = expr::vanishes(r.residual(), FuzzConfig{}.with_epsilon(1e-9));
    EXPECT_TRUE(v.vanishes) << expr::to_string(L.body) << " relative " << v.max_relative;
  }
}

TEST(EnergyRate, NullLagrangianHasOnShellBalance) {
  const auto L = variational::lift_gauge(catalog::gauge_general(parse("t"), parse("1 + t^2"), parse("sin(t)")));
  const auto r = variational::energy_rate_residual(L);
  EXPECT_TRUE(expr::vanishes(expr::sum({r.energy_rate, r.explicit_time})).vanishes);
}

TEST(IsNull, Examples) {
  EXPECT_TRUE(variational::is_null(lag("xdot", LagrangianKind::null)).null);
  const auto v = variational::is_null(catalog::standard_inertia());
  EXPECT_FALSE(v.null);
  EXPECT_EQ(v.component, "A");
  ASSERT_TRUE(v.witness);
  EXPECT_DOUBLE_EQ(v.witness->lhs, 1.0);
  const auto phi = catalog::gauge_general(parse("t"), parse("1 + t^2"), parse("sin(t)"));
  EXPECT_TRUE(variational::is_null(variational::lift_gauge(phi)).null);
}

TEST(IsNull, ConstraintLagrangianReportsB) {
  // L = x^2: A = 0, B = -2x.
  const auto v = variational::is_null(lag("x^2"));
  EXPECT_FALSE(v.null);
  EXPECT_EQ(v.component, "B");
}

TEST(LiftGauge, Examples) {
  EXPECT_EQ(variational::lift_gauge(variational::GaugeFunction::make(parse("x*t"))).body,
            expr::simplify(parse("t*xdot + x")));
  const auto nb = catalog::null_basic(1.5, 2, 0.5);
  const auto lifted = variational::lift_gauge(nb.gauge);
  EXPECT_EQ(lifted.kind, LagrangianKind::null);
  EXPECT_TRUE(expr::equivalent(lifted.body, nb.lagrangian.body).equivalent);
}

TEST(LiftGauge, ClosureOverCorpus) {
  for (const auto& phi : corpus::gauges(20, 11)) {
    const auto v = variational::is_null(variational::lift_gauge(phi));
    EXPECT_TRUE(v.null) << expr::to_string(phi.body) << " " << v.component << " " << v.max_relative;
  }
}

TEST(LiftGauge, AddingNullLagrangianKeepsEquations) {
  const std::vector<variational::Lagrangian> base = {
      catalog::standard_inertia(),
      catalog::nsl_general(catalog::CoefficientSet::inertia_1(1, 1, 1, 1)),
      catalog::nsl_general(catalog::CoefficientSet::inertia_2(2)),
  };
  for (const auto& L : base) {
    const Expr el = variational::euler_lagrange(L).residual();
    for (const auto& phi : corpus::gauges(4, 5)) {
      const auto sum = variational::Lagrangian::make(L.body + variational::lift_gauge(phi).body, L.kind);
      const Expr el2 = variational::euler_lagrange(sum).residual();
      const auto v = expr::equivalent(el, el2, FuzzConfig{}.with_samples(300));
      EXPECT_TRUE(v.equivalent) << expr::to_string(L.body) << " + d/dt " << expr::to_string(phi.body);
    }
  }
}

TEST(SolveForAcceleration, Examples) {
  EXPECT_TRUE(variational::solve_for_acceleration(catalog::standard_inertia()).is_zero());
  EXPECT_EQ(variational::solve_for_acceleration(lag("xdot^2/2 - x^2/2")), -expr::x());
}

TEST(SolveForAcceleration, InertiaRecovered) {
  for (const auto& set : {catalog::CoefficientSet::inertia_1(1, 1, 1, 1), catalog::CoefficientSet::inertia_2(1)}) {
    const Expr a = variational::solve_for_acceleration(catalog::nsl_general(set));
    const auto guards = expr::singular_subexpressions(catalog::nsl_general(set).body);
    expr::for_each_sample(FuzzConfig{}, guards, [&](const Binding& b) {
      EXPECT_LT(std::fabs(expr::evaluate(a, b)), 1e-9);
    });
  }
}

TEST(SolveForAcceleration, DegenerateCasesAreDistinguished) {
  try {
    variational::solve_for_acceleration(catalog::null_basic(1, 1, 0).lagrangian);
    FAIL() << "null Lagrangian accepted";
  } catch (const variational::DegenerateLagrangianError& e) {
    EXPECT_EQ(e.reason(), variational::DegenerateLagrangianError::Reason::null);
  }
  try {
    variational::solve_for_acceleration(lag("x^2*t"));
    FAIL() << "constraint Lagrangian accepted";
  } catch (const variational::DegenerateLagrangianError& e) {
    EXPECT_EQ(e.reason(), variational::DegenerateLagrangianError::Reason::constraint);
  }
}
