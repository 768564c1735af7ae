#include <gtest/gtest.h>

#include "corpus.hpp"
#include "gaugelab/calculus.hpp"
#include "gaugelab/forces.hpp"
#include "gaugelab/parser.hpp"

using namespace gaugelab;
using catalog::CoefficientSet;
using expr::Expr;
using expr::FuzzConfig;
using expr::parse;
using expr::Var;
using forces::Route;

namespace {

variational::GaugeFunction generic_gauge() {
  return catalog::gauge_general(parse("1 + 0.5*t^2"), parse("2 + sin(t)"), parse("exp(0.5*t)"));
}

forces::ForceLaw law(const Expr& body) { return forces::ForceLaw{body, forces::Provenance::special_case, "test", {}}; }

}  // namespace

TEST(Routes, ParseNames) {
  EXPECT_EQ(forces::parse_route("A"), Route::A);
  EXPECT_EQ(forces::parse_route("B"), Route::B);
  EXPECT_EQ(forces::parse_route("eq9"), Route::eq9);
  EXPECT_THROW(forces::parse_route("C"), std::invalid_argument);
}

TEST(ForceFromGauge, RouteAExamples) {
  const auto F = forces::force_from_gauge(variational::GaugeFunction::make(parse("x*t")), Route::A);
  EXPECT_EQ(F.body, expr::constant(-1.0));
  EXPECT_EQ(F.provenance, forces::Provenance::route_a);
  const auto c = catalog::gauge_general(parse("2"), parse("3"), parse("-1"));
  EXPECT_TRUE(forces::force_from_gauge(c, Route::A).body.is_zero());
}

TEST(ForceFromGauge, RoutesNeedTriple) {
  const auto phi = variational::GaugeFunction::make(parse("x*t"));
  EXPECT_THROW(forces::force_from_gauge(phi, Route::B), std::invalid_argument);
  EXPECT_THROW(forces::force_from_gauge(phi, Route::eq9), std::invalid_argument);
}

// Route A differs from route B by exactly the velocity term of the printed
// energy: F_A = F_B - h1 h2 xdot / (h2 x + h4)^2.
TEST(ForceFromGauge, RouteAAndBDifferByVelocityTerm) {
  for (const auto& tr : corpus::random_triples(5, 3)) {
    const auto phi = catalog::gauge_general(tr.h1, tr.h2, tr.h4);
    const auto s = catalog::gauge_symbols(*phi.triple);
    const Expr a = forces::force_from_gauge(phi, Route::A).body;
    const Expr b = forces::force_from_gauge(phi, Route::B).body;
    const Expr term = parse("h1*h2*xdot/(h2*x + h4)^2", s);
    EXPECT_TRUE(expr::equivalent(a, b - term).equivalent) << tr.text;
    EXPECT_FALSE(expr::depends_on(a, Var::xdot)) << tr.text;
  }
}

TEST(ForceFromGauge, ClearedFormEqualsPrinted) {
  const auto phi = generic_gauge();
  const Expr printed = forces::force_from_gauge(phi, Route::eq9).body;
  EXPECT_TRUE(expr::equivalent(printed, forces::eq9_cleared(*phi.triple)).equivalent);
}

TEST(ForceFromGauge, ClearedFormWhenH2Vanishes) {
  const variational::GaugeTriple tr{Expr::coefficient("h1", parse("1 + t")), Expr::coefficient("h2", parse("0")),
                                    Expr::coefficient("h4", parse("exp(t)"))};
  const auto F = forces::printed_eq9_force(tr);
  EXPECT_FALSE(expr::depends_on(F.body, Var::x));
  EXPECT_FALSE(expr::depends_on(F.body, Var::xdot));
  // -(h1 h4dot - h4 h1dot)/h4^2 = -(1 + t - 1) e^t / e^(2t) = -t e^(-t).
  EXPECT_TRUE(expr::equivalent(F.body, parse("-t*exp(-t)")).equivalent);
}

TEST(TotalLagrangian, AdditivityOverCorpus) {
  const std::vector<catalog::CoefficientSet> sets = {CoefficientSet::inertia_1(1, 1, 1, 1),
                                                     CoefficientSet::inertia_1(0.5, -1, 2, 0.3),
                                                     CoefficientSet::inertia_2(1)};
  for (const auto& set : sets) {
    const auto lns = catalog::nsl_general(set);
    const Expr el_ns = variational::euler_lagrange(lns).residual();
    for (const auto& phi : corpus::gauges(3, 9)) {
      const auto lt = forces::total_lagrangian(lns, phi);
      EXPECT_EQ(lt.kind, variational::LagrangianKind::total);
      const Expr lhs = variational::euler_lagrange(lt).residual();
      const Expr rhs = el_ns + expr::partial(expr::partial(phi.body, Var::t), Var::x);
      const auto v = expr::equivalent(lhs, rhs, FuzzConfig{}.with_samples(300).with_epsilon(1e-9));
      EXPECT_TRUE(v.equivalent) << expr::to_string(phi.body) << " " << v.max_residual;
    }
  }
}

TEST(TotalLagrangian, TimeIndependentGaugeIsNeutral) {
  const auto lns = catalog::nsl_general(CoefficientSet::inertia_2(1));
  const auto phi = catalog::null_basic(1, 2, 3).gauge;
  EXPECT_EQ(forces::total_lagrangian(lns, phi).body, expr::simplify(lns.body));
  EXPECT_TRUE(forces::force_from_gauge(phi, Route::A).body.is_zero());
}

TEST(EffectiveForce, Examples) {
  const auto s1 = CoefficientSet::inertia_1(1, 0, 1, 1);
  const auto s2 = CoefficientSet::inertia_2(1);
  EXPECT_TRUE(forces::effective_force(law(Expr()), 1, s1).body.is_zero());
  EXPECT_TRUE(forces::effective_force(law(Expr()), 2, s2).body.is_zero());
  const auto f1 = forces::effective_force(law(expr::constant(-1)), 1, s1);
  EXPECT_EQ(f1.provenance, forces::Provenance::effective_f1);
  EXPECT_TRUE(expr::equivalent(f1.body, parse("-((t + 1)*xdot - x)^3")).equivalent);
  const auto f2 = forces::effective_force(law(parse("x")), 2, s2);
  EXPECT_TRUE(expr::equivalent(f2.body, parse("x*xdot^2/2")).equivalent);
  EXPECT_THROW(forces::effective_force(law(Expr()), 2, s1), std::invalid_argument);
  EXPECT_THROW(forces::effective_force(law(Expr()), 1, s2), std::invalid_argument);
}

// Solving EL[L_t] = 0 for xddot gives F C1 D^3 / 2 (set 1) and F C3 xdot^3 / 2
// (set 2), so the printed effective forces are off by 2 and by xdot.
TEST(EffectiveForce, ComparedWithSolvedAcceleration) {
  const auto phi = generic_gauge();
  const auto c1 = forces::check_effective_force(phi, 1, CoefficientSet::inertia_1(1, 1, 1, 1));
  EXPECT_FALSE(c1.equal);
  EXPECT_NE(c1.note.find("F_eff = 2 * -B/A"), std::string::npos) << c1.note;
  const auto c2 = forces::check_effective_force(phi, 2, CoefficientSet::inertia_2(1));
  EXPECT_FALSE(c2.equal);
  EXPECT_NE(c2.note.find("xdot^(-1)"), std::string::npos) << c2.note;

  // Independent statement of the solved acceleration.
  const auto set = CoefficientSet::inertia_1(1, 1, 1, 1);
  const Expr FA = forces::force_from_gauge(phi, Route::A).body;
  const Expr D = parse("f*xdot - a_o*x + C2", set.symbols);
  EXPECT_TRUE(expr::equivalent(c1.acceleration, FA * set.symbol("C1") * expr::pow(D, 3) / expr::constant(2))
                  .equivalent);
}

TEST(Classify, Examples) {
  expr::SymbolTable s;
  s.define("c1", "1");
  const auto damp = forces::classify(law(parse("-c1*xdot/x", s)));
  EXPECT_TRUE(damp.velocity_dependent);
  EXPECT_TRUE(damp.position_dependent);
  EXPECT_TRUE(damp.dissipative);
  EXPECT_FALSE(damp.zero);
  EXPECT_FALSE(damp.time_only);

  const variational::GaugeTriple tr{Expr::coefficient("h1", parse("1 + t")), Expr::coefficient("h2", parse("0")),
                                    Expr::coefficient("h4", parse("exp(t)"))};
  const auto limit = forces::classify(forces::printed_eq9_force(tr));
  EXPECT_TRUE(limit.time_only);
  EXPECT_FALSE(limit.dissipative);

  const auto zero = forces::classify(law(Expr()));
  EXPECT_TRUE(zero.zero);
  EXPECT_FALSE(zero.dissipative || zero.velocity_dependent || zero.position_dependent || zero.time_only);

  const auto constant = forces::classify(law(expr::constant(2)));
  EXPECT_FALSE(constant.zero || constant.time_only || constant.position_dependent || constant.velocity_dependent);
}

TEST(Classify, RouteANeverVelocityDependent) {
  for (const auto& phi : corpus::gauges(10, 21)) {
    const auto c = forces::classify(forces::force_from_gauge(phi, Route::A), FuzzConfig{}.with_samples(200));
    EXPECT_FALSE(c.velocity_dependent) << expr::to_string(phi.body);
    EXPECT_EQ(c.velocity_fraction, 0.0);
  }
}

TEST(Classify, PrintedRouteIsDissipative) {
  for (const auto& tr : corpus::random_triples(10, 23)) {
    const auto phi = catalog::gauge_general(tr.h1, tr.h2, tr.h4);
    const auto F = forces::force_from_gauge(phi, Route::eq9);
    const auto c = forces::classify(F, FuzzConfig{}.with_samples(200));
    EXPECT_TRUE(c.dissipative) << tr.text;
    EXPECT_GE(c.velocity_fraction, 0.99) << tr.text;
    const auto f1 = forces::effective_force(F, 1, CoefficientSet::inertia_1(1, 1, 1, 1));
    const auto f2 = forces::effective_force(F, 2, CoefficientSet::inertia_2(1));
    EXPECT_TRUE(forces::classify(f1, FuzzConfig{}.with_samples(200)).dissipative) << tr.text;
    EXPECT_TRUE(forces::classify(f2, FuzzConfig{}.with_samples(200)).dissipative) << tr.text;
  }
}

TEST(Classify, Deterministic) {
  const auto F = forces::force_from_gauge(generic_gauge(), Route::eq9);
  EXPECT_EQ(forces::to_json(forces::classify(F)).dump(), forces::to_json(forces::classify(F)).dump());
}

TEST(ForceLaw, JsonShape) {
  auto F = forces::force_from_gauge(generic_gauge(), Route::B);
  F.classification = forces::classify(F, FuzzConfig{}.with_samples(50));
  const auto j = forces::to_json(F);
  EXPECT_EQ(j["provenance"], "route-B");
  EXPECT_EQ(parse(j["expression"].get<std::string>(), catalog::gauge_symbols(*generic_gauge().triple)), F.body);
  EXPECT_TRUE(j["classification"]["flags"].is_array());
}
