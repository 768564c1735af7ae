#include <gtest/gtest.h>

#include <cmath>

#include "gaugelab/calculus.hpp"
#include "gaugelab/evaluate.hpp"
#include "gaugelab/fuzz.hpp"
#include "gaugelab/parser.hpp"

using namespace gaugelab::expr;

namespace {

SymbolTable generic_symbols() {
  SymbolTable s;
  s.define("g1", "1 + t^2");
  s.define("g2", "sin(t)");
  s.define("g3", "exp(0.5*t)");
  s.define("a2", "2");
  s.define("a4", "0.5");
  s.define("h1", "t");
  s.define("h2", "1 + t^2");
  s.define("h4", "sin(t)");
  return s;
}

// Central difference in one variable, step 1e-5 * max(1, |v|).
double central_difference(const Expr& e, Binding b, Var v) {
  const double v0 = b.at(v);
  const double h = 1e-5 * std::max(1.0, std::fabs(v0));
  b.set(v, v0 + h);
  const double up = evaluate(e, b);
  b.set(v, v0 - h);
  const double down = evaluate(e, b);
  return (up - down) / (2.0 * h);
}

void expect_partial_matches_finite_difference(const Expr& e, Var v) {
  const Expr d = partial(e, v);
  FuzzConfig cfg;
  cfg.samples = 100;
  std::vector<Expr> guards = singular_subexpressions(e);
  for (const auto& g : singular_subexpressions(d)) guards.push_back(g);
  std::size_t checked = for_each_sample(cfg, guards, [&](const Binding& b) {
    const double symbolic = evaluate(d, b);
    const double numeric = central_difference(e, b, v);
    EXPECT_LT(std::fabs(symbolic - numeric) / std::max(1.0, std::fabs(symbolic)), 1e-6)
        << to_string(e) << " d/d" << var_name(v) << " at t=" << b.at(Var::t) << " x=" << b.at(Var::x)
        << " xdot=" << b.at(Var::xdot);
  });
  EXPECT_GE(checked, 100u);
}

}  // namespace

TEST(Parse, DivisionByLiteralBecomesScaledProduct) {
  const Expr e = parse("xdot^2/2");
  ASSERT_EQ(e.kind(), Kind::product);
  EXPECT_TRUE(e.child(0).is_constant(0.5));
  EXPECT_EQ(e.child(1), pow(xdot(), 2));
}

TEST(Parse, ReciprocalOfLinearFormIsQuotient) {
  const auto s = generic_symbols();
  const Expr e = parse("1/(g1*xdot + g2*x + g3)", s);
  ASSERT_EQ(e.kind(), Kind::quotient);
  EXPECT_TRUE(e.child(0).is_one());
  EXPECT_EQ(e.child(1).kind(), Kind::sum);
  EXPECT_EQ(e.child(1).children().size(), 3u);
}

TEST(Parse, LogOfAbsoluteValueIsOneNode) {
  const auto s = generic_symbols();
  const Expr e = parse("ln(abs(h2*x + h4))", s);
  ASSERT_EQ(e.kind(), Kind::log_abs);
  EXPECT_EQ(e.child().kind(), Kind::sum);
}

TEST(Parse, PrecedenceFollowsArithmetic) {
  const Binding b(0.5, 2.0, 3.0, 0.0);
  EXPECT_DOUBLE_EQ(evaluate(parse("1 + 2*x^2 - xdot/3"), b), 1.0 + 8.0 - 1.0);
  EXPECT_DOUBLE_EQ(evaluate(parse("-x^2"), b), -4.0);
  EXPECT_DOUBLE_EQ(evaluate(parse("x/xdot/2"), b), 2.0 / 3.0 / 2.0);
  EXPECT_DOUBLE_EQ(evaluate(parse("x^(-1)"), b), 0.5);
  EXPECT_DOUBLE_EQ(evaluate(parse("xdot^(1/2)"), b), std::sqrt(3.0));
}

TEST(Parse, ErrorsCarryPosition) {
  try {
    (void)parse("x + * 2");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 4u);
  }
  EXPECT_THROW((void)parse("x + q"), UnknownIdentifierError);
  EXPECT_THROW((void)parse("ln(x)"), ParseError);
  EXPECT_THROW((void)parse("(x + 1"), ParseError);
  EXPECT_THROW((void)parse("x^1.5"), ParseError);
  EXPECT_THROW((void)parse("x/0"), ParseError);
}

TEST(Parse, DerivativeSuffixResolvesThroughDefinition) {
  const auto s = generic_symbols();
  const Expr d = parse("h2dot", s);
  const Binding b(0.7, 0, 0, 0);
  EXPECT_NEAR(evaluate(d, b), 2 * 0.7, 1e-15);
  EXPECT_TRUE(parse("a2dot", s).is_zero());
}

TEST(Print, RoundTripIsStructural) {
  const auto s = generic_symbols();
  const char* samples[] = {
      "xdot^2/2",
      "1/(g1*xdot + g2*x + g3)",
      "-(1 + g1*xdot/(g1*xdot + g2*x + g3))/(g1*xdot + g2*x + g3)",
      "(h1/h2)*ln(abs(h2*x + h4))",
      "x - 2*xdot + (-3)*t - (x + t)",
      "-x*xdot/(t - 1)^3 + exp(-t)*sin(2*t) - cos(x)^(1/3)",
      "(-2)^(1/3) + x^(-2) - (-x)",
      "2*xddot/(h1*(h2*xdot - x + 1)^3)",
  };
  for (const char* text : samples) {
    const Expr e = parse(text, s);
    const std::string printed = to_string(e);
    EXPECT_EQ(parse(printed, s), e) << text << " printed as " << printed;
    // Derived expressions must round-trip too.
    const Expr d = simplify(partial(e, Var::x));
    EXPECT_EQ(parse(to_string(d), s), d) << to_string(d);
  }
}

TEST(Evaluate, Examples) {
  const auto s = generic_symbols();
  EXPECT_DOUBLE_EQ(evaluate(parse("xdot^2/2"), Binding(0, 0, 2, 0)), 2.0);
  SymbolTable c3;
  c3.define("C3", "1");
  EXPECT_DOUBLE_EQ(evaluate(parse("1/(C3*xdot)", c3), Binding(0, 0, 2, 0)), 0.5);

  SymbolTable h;
  h.define("h2", "1");
  h.define("h4", "0");
  try {
    (void)evaluate(parse("ln(abs(h2*x + h4))", h), Binding(0, 0, 0, 0));
    FAIL() << "expected SingularPointError";
  } catch (const SingularPointError& e) {
    EXPECT_NE(e.subexpression().find("h2*x"), std::string::npos);
  }
  EXPECT_THROW((void)evaluate(parse("xddot"), Binding{}), UnboundSymbolError);
}

TEST(Evaluate, CoefficientOverrideWins) {
  auto s = generic_symbols();
  const Expr e = parse("g1*x", s);
  Binding b(1.0, 2.0, 0, 0);
  EXPECT_DOUBLE_EQ(evaluate(e, b), 4.0);
  b.coefficients["g1"] = 10.0;
  EXPECT_DOUBLE_EQ(evaluate(e, b), 20.0);
}

TEST(Partial, PowerRule) { EXPECT_EQ(simplify(partial(parse("xdot^2/2"), Var::xdot)), xdot()); }

TEST(Partial, LogAbsGivesReciprocalOfArgument) {
  const auto s = generic_symbols();
  const Expr d = simplify(partial(parse("ln(abs(a2*x + a4))", s), Var::x));
  EXPECT_TRUE(equivalent(d, parse("a2/(a2*x + a4)", s)).equivalent) << to_string(d);
}

TEST(Partial, MatchesFiniteDifferenceOracle) {
  const auto s = generic_symbols();
  const Expr nsl = parse("1/(g1*xdot + g2*x + g3)", s);
  expect_partial_matches_finite_difference(nsl, Var::xdot);
  expect_partial_matches_finite_difference(nsl, Var::x);
  expect_partial_matches_finite_difference(nsl, Var::t);
  // -g1/(g1 xdot + g2 x + g3)^2
  EXPECT_TRUE(equivalent(partial(nsl, Var::xdot), parse("-g1/(g1*xdot + g2*x + g3)^2", s)).equivalent);

  const Expr gauge = parse("(h1/h2)*ln(abs(h2*x + h4))", s);
  expect_partial_matches_finite_difference(gauge, Var::x);
  expect_partial_matches_finite_difference(gauge, Var::t);
  expect_partial_matches_finite_difference(parse("exp(-t)*sin(2*x) - cos(xdot*t)^(1/3)", s), Var::t);
}

TEST(Partial, IsLinear) {
  const auto s = generic_symbols();
  const Expr e1 = parse("xdot^3*g1 + ln(abs(x))", s);
  const Expr e2 = parse("sin(x*t)/(1 + xdot^2)", s);
  const Expr lhs = partial(constant(2.5) * e1 + constant(-0.75) * e2, Var::x);
  const Expr rhs = constant(2.5) * partial(e1, Var::x) + constant(-0.75) * partial(e2, Var::x);
  EXPECT_TRUE(equivalent(lhs, rhs).equivalent);
}

TEST(Partial, MixedPartialsCommuteOnGaugeFunctions) {
  const auto s = generic_symbols();
  const Expr gauge = parse("(h1/h2)*ln(abs(h2*x + h4))", s);
  const Expr xt = partial(partial(gauge, Var::x), Var::t);
  const Expr tx = partial(partial(gauge, Var::t), Var::x);
  EXPECT_TRUE(equivalent(xt, tx).equivalent);
}

TEST(TotalTimeDerivative, Examples) {
  EXPECT_EQ(total_time_derivative(x()), xdot());

  SymbolTable s;
  s.define("a1", "1.5");
  s.define("a2", "2");
  s.define("a4", "-0.5");
  const Expr phi = parse("(a1/a2)*ln(abs(a2*x + a4))", s);
  const Expr lhs = total_time_derivative(phi);
  EXPECT_TRUE(equivalent(lhs, parse("a1*xdot/(a2*x + a4)", s)).equivalent) << to_string(lhs);

  EXPECT_THROW((void)total_time_derivative(xddot()), std::invalid_argument);
}

TEST(TotalTimeDerivative, AgreesWithDerivativeAlongPath) {
  const auto s = generic_symbols();
  const Expr e = parse("(h1/h2)*ln(abs(h2*x + h4)) + g1*xdot^2 - x*xdot/g3", s);
  const Expr d = total_time_derivative(e);
  auto along = [](const Expr& f, double tau) {
    return evaluate(f, Binding(tau, std::sin(tau), std::cos(tau), -std::sin(tau)));
  };
  for (double tau : {0.3, 0.9, 1.4, 2.2, -0.6}) {
    const double h = 1e-5;
    const double numeric = (along(e, tau + h) - along(e, tau - h)) / (2 * h);
    EXPECT_NEAR(along(d, tau), numeric, 1e-5) << "t=" << tau;
  }
}

TEST(Simplify, Examples) {
  EXPECT_EQ(simplify(constant(0.0) * xdot() + x()), x());

  SymbolTable s;
  s.define("a2", "t + 2");
  s.define("a4", "3");
  const auto r = simplify_with_assumptions(parse("(a2*x + a4)/(a2*x + a4)", s));
  EXPECT_TRUE(r.expr.is_one());
  ASSERT_EQ(r.nonzero_assumptions.size(), 1u);
  EXPECT_EQ(r.nonzero_assumptions[0], simplify(parse("a2*x + a4", s)));

  EXPECT_EQ(simplify(parse("x*xdot - xdot*x")), constant(0.0));
  EXPECT_EQ(simplify(parse("2*x/x^3")), parse("2/x^2"));
  EXPECT_EQ(simplify(parse("-(x - xdot)")), simplify(parse("xdot - x")));
}

TEST(Simplify, PreservesValue) {
  const auto s = generic_symbols();
  const char* samples[] = {
      "(h1*(h2*xdot + h2dot*x) + h4dot)/(h2*(h2*x + h4)) + (h1dot/h2 - h1*h2dot/h2^2)*ln(abs(h2*x + h4))",
      "x^2*(x + 1)/(x*(1 + x)) - x",
      "(x*xdot)^3/(xdot^2*x)^(1/3)",
      "-(1 + g1*xdot/(g1*xdot + g2*x + g3))/(g1*xdot + g2*x + g3)",
  };
  for (const char* text : samples) {
    const Expr e = parse(text, s);
    EXPECT_TRUE(equivalent(simplify(e), e).equivalent) << text;
  }
}

TEST(Equivalent, Examples) {
  EXPECT_TRUE(equivalent(parse("(xdot + x)^2"), parse("xdot^2 + 2*x*xdot + x^2")).equivalent);

  const auto v = equivalent(parse("xdot^2"), parse("xdot^3"));
  EXPECT_FALSE(v.equivalent);
  ASSERT_TRUE(v.witness);
  const double w = v.witness->binding.at(Var::xdot);
  EXPECT_DOUBLE_EQ(v.witness->lhs, w * w);
  EXPECT_DOUBLE_EQ(v.witness->rhs, w * w * w);
}

TEST(Equivalent, DeterministicUnderSeed) {
  const auto a = equivalent(parse("1/x"), parse("1/(x + 0.001*t)"));
  const auto b = equivalent(parse("1/x"), parse("1/(x + 0.001*t)"));
  EXPECT_EQ(a.max_residual, b.max_residual);
  EXPECT_EQ(a.witness->binding.at(Var::x), b.witness->binding.at(Var::x));
}

TEST(Equivalent, ExhaustedBoxIsIndeterminate) {
  FuzzConfig cfg;
  cfg.samples = 10;
  cfg.delta = 100.0;
  EXPECT_THROW((void)equivalent(parse("1/x"), parse("1/x"), cfg), IndeterminateError);
}

TEST(FuzzConfig, RejectsInvalidValues) {
  FuzzConfig cfg;
  cfg.delta = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.epsilon = -1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.samples = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(FuzzConfig, DefaultBoxAvoidsOrigin) {
  FuzzConfig cfg;
  for (std::size_t i = 0; i < 2000; ++i) {
    const double v = cfg.box[0].map(unit_draw(cfg.seed, i, 0, 0));
    EXPECT_GE(std::fabs(v), 0.1);
    EXPECT_LE(std::fabs(v), 2.0);
  }
}
