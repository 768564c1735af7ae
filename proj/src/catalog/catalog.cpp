#include "gaugelab/catalog.hpp"

#include <array>
#include <cmath>
#include <set>
#include <sstream>

#include "gaugelab/calculus.hpp"
#include "gaugelab/forces.hpp"

namespace gaugelab::catalog {

using expr::Var;
using variational::LagrangianKind;

std::string_view set_name(SetId id) {
  switch (id) {
    case SetId::inertia_1: return "inertia-set-1";
    case SetId::inertia_2: return "inertia-set-2";
    case SetId::custom: return "custom";
  }
  return "custom";
}

namespace {

bool vanishes_identically(const Expr& e) {
  return expr::vanishes(e, FuzzConfig{}.with_samples(64)).vanishes;
}

Expr named_constant(CoefficientSet& s, const std::string& name, double value) {
  s.constants[name] = value;
  return s.symbols.define(name, expr::constant(value));
}

void define_gs(CoefficientSet& s) {
  s.symbols.define("g1", s.g1);
  s.symbols.define("g2", s.g2);
  s.symbols.define("g3", s.g3);
}

}  // namespace

CoefficientSet CoefficientSet::inertia_1(double C1, double C2, double a_o, double v_o) {
  if (C1 == 0.0) throw std::invalid_argument("inertia set 1 requires C1 != 0");
  if (a_o == 0.0 && v_o == 0.0) throw std::invalid_argument("inertia set 1 requires f = a_o t + v_o not identically 0");
  CoefficientSet s;
  s.id = SetId::inertia_1;
  const Expr c1 = named_constant(s, "C1", C1);
  const Expr c2 = named_constant(s, "C2", C2);
  const Expr ao = named_constant(s, "a_o", a_o);
  const Expr vo = named_constant(s, "v_o", v_o);
  const Expr f = s.symbols.define("f", ao * expr::t() + vo);
  s.g1 = c1 * expr::pow(f, 3);
  s.g2 = -(c1 * ao * expr::pow(f, 2));
  s.g3 = c1 * c2 * expr::pow(f, 2);
  define_gs(s);
  return s;
}

CoefficientSet CoefficientSet::inertia_2(double C3) {
  if (C3 == 0.0) throw std::invalid_argument("inertia set 2 requires C3 != 0");
  CoefficientSet s;
  s.id = SetId::inertia_2;
  s.g1 = named_constant(s, "C3", C3);
  s.g2 = Expr();
  s.g3 = Expr();
  define_gs(s);
  return s;
}

CoefficientSet CoefficientSet::custom(Expr g1, Expr g2, Expr g3) {
  for (const Expr* g : {&g1, &g2, &g3}) {
    if (expr::depends_on(*g, Var::x) || expr::depends_on(*g, Var::xdot) || expr::depends_on(*g, Var::xddot)) {
      throw std::invalid_argument("coefficients g1, g2, g3 must be functions of t");
    }
  }
  CoefficientSet s;
  s.g1 = std::move(g1);
  s.g2 = std::move(g2);
  s.g3 = std::move(g3);
  define_gs(s);
  return s;
}

Expr CoefficientSet::symbol(std::string_view name) const {
  if (auto e = symbols.lookup(name)) return *e;
  throw std::out_of_range("coefficient set has no symbol '" + std::string(name) + "'");
}

Lagrangian standard_inertia() {
  return Lagrangian::make(expr::parse("xdot^2/2"), LagrangianKind::standard);
}

Lagrangian nsl_general(const CoefficientSet& c) {
  if (vanishes_identically(c.g1) && vanishes_identically(c.g2) && vanishes_identically(c.g3)) {
    throw std::invalid_argument("degenerate denominator: g1, g2 and g3 all vanish");
  }
  Expr den = expr::sum({c.g1 * expr::xdot(), c.g2 * expr::x(), c.g3});
  return Lagrangian::make(expr::quotient(expr::constant(1.0), den), LagrangianKind::non_standard, c.constants);
}

NullPair null_basic(double a1, double a2, double a4) {
  if (a2 == 0.0) throw std::invalid_argument("null_basic requires a2 != 0");
  const Expr u = expr::constant(a2) * expr::x() + expr::constant(a4);
  NullPair p{
      GaugeFunction::make(expr::constant(a1 / a2) * expr::log_abs(u)),
      Lagrangian::make(expr::constant(a1) * expr::xdot() / u, LagrangianKind::null,
                       {{"a1", a1}, {"a2", a2}, {"a4", a4}}),
  };
  return p;
}

namespace {

Expr as_coefficient(const std::string& name, const Expr& e) {
  if (e.kind() == expr::Kind::coefficient && e.name() == name) return e;
  return Expr::coefficient(name, e);
}

}  // namespace

GaugeFunction gauge_general(const Expr& h1, const Expr& h2, const Expr& h4) {
  GaugeTriple tr{as_coefficient("h1", h1), as_coefficient("h2", h2), as_coefficient("h4", h4)};
  if (vanishes_identically(tr.h2)) throw std::invalid_argument("gauge function requires h2 not identically 0");
  Expr body = tr.h1 / tr.h2 * expr::log_abs(tr.h2 * expr::x() + tr.h4);
  return GaugeFunction::make(std::move(body), std::move(tr));
}

expr::SymbolTable gauge_symbols(const GaugeTriple& triple) {
  expr::SymbolTable s;
  s.define("h1", triple.h1.kind() == expr::Kind::coefficient ? triple.h1.definition() : triple.h1);
  s.define("h2", triple.h2.kind() == expr::Kind::coefficient ? triple.h2.definition() : triple.h2);
  s.define("h4", triple.h4.kind() == expr::Kind::coefficient ? triple.h4.definition() : triple.h4);
  return s;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::array kForms = {FormId::eq1b,     FormId::eq3b, FormId::eq5,         FormId::eq8a_lhs,
                               FormId::eq8b_lhs, FormId::eq9,  FormId::sec5_h4zero, FormId::sec5_h4const};

}  // namespace

std::span<const FormId> all_form_ids() { return kForms; }

std::string_view form_name(FormId id) {
  switch (id) {
    case FormId::eq1b: return "eq1b";
    case FormId::eq3b: return "eq3b";
    case FormId::eq5: return "eq5";
    case FormId::eq8a_lhs: return "eq8a-lhs";
    case FormId::eq8b_lhs: return "eq8b-lhs";
    case FormId::eq9: return "eq9";
    case FormId::sec5_h4zero: return "sec5-case-h4zero";
    case FormId::sec5_h4const: return "sec5-case-h4const";
  }
  return "";
}

FormId parse_form_id(std::string_view name) {
  for (FormId id : kForms) {
    if (form_name(id) == name) return id;
  }
  throw UnknownFormError(name);
}

std::string_view transcription(FormId id) {
  switch (id) {
    case FormId::eq1b:
      return "-(1 + g1*xdot*L)*L";
    case FormId::eq3b:
      return "(h1*(h2*xdot + h2dot*x) + h4dot)/(h2*(h2*x + h4)) + (h1dot/h2 - h1*h2dot/h2^2)*ln(abs(h2*x + h4))";
    case FormId::eq5:
      return "-(h1dot/h1 - h2dot/h2)*(h1/h2)*ln(abs(h2*x + h4)) - (h1/h2)*(h2*xdot + h2dot*x + h4dot)/(h2*x + h4)";
    case FormId::eq8a_lhs:
      return "2*xddot/(C1*(f*xdot - a_o*x + C2)^3)";
    case FormId::eq8b_lhs:
      return "2*xddot/(C3*xdot^2)";
    case FormId::eq9:
      return "h1*h2/(h2*x + h4)^2*(xdot + (h2dot/h2 - h1dot/h1)*x) - h1*h4/(h2*x + h4)^2*(h4dot/h4 - h1dot/h1)";
    case FormId::sec5_h4zero:
      return "-c1*xdot/x";
    case FormId::sec5_h4const:
      return "-c1*c2*xdot/(c2*x + c4)";
  }
  throw UnknownFormError("?");
}

Expr instantiate(FormId id, const expr::SymbolTable& symbols) {
  std::string text(transcription(id));
  if (id == FormId::eq1b) {
    const std::string lns = "(1/(g1*xdot + g2*x + g3))";
    for (std::size_t pos = text.find('L'); pos != std::string::npos; pos = text.find('L', pos + lns.size())) {
      text.replace(pos, 1, lns);
    }
  }
  return expr::parse(text, symbols);
}

namespace {

expr::SymbolTable constants_table(const FormContext& ctx, bool with_h4) {
  expr::SymbolTable s;
  s.define("c1", expr::constant(ctx.c1));
  s.define("c2", expr::constant(ctx.c2));
  if (with_h4) s.define("c4", expr::constant(ctx.c4));
  return s;
}

// Canonical left side of the forced equation: EL[L_t] with the gauge force
// term moved to the right, i.e. EL[L_t] - d2Phi/dtdx.
Expr forced_lhs(const CoefficientSet& set, const GaugeFunction& phi) {
  const Lagrangian lt = forces::total_lagrangian(nsl_general(set), phi);
  const Expr force_term = expr::partial(expr::partial(phi.body, Var::t), Var::x);
  return expr::simplify(variational::euler_lagrange(lt).residual() - force_term);
}

}  // namespace

PrintedForm printed_form(FormId id, const FormContext& ctx) {
  PrintedForm f{id, std::string(transcription(id)), {}, {}, {}, {}};
  const GaugeFunction phi = gauge_general(ctx.h1, ctx.h2, ctx.h4);
  const GaugeTriple& tr = *phi.triple;
  const expr::SymbolTable hs = gauge_symbols(tr);
  switch (id) {
    case FormId::eq1b:
      f.recipe = "energy_function(nsl_general(g1, g2, g3))";
      f.printed = instantiate(id, ctx.nsl.symbols);
      f.canonical = variational::energy_function(nsl_general(ctx.nsl));
      break;
    case FormId::eq3b: {
      f.recipe = "lift_gauge(gauge_general(h1, h2, h4))";
      f.printed = instantiate(id, hs);
      f.canonical = variational::lift_gauge(phi).body;
      f.hints.push_back({"h4dot outside the h1 bracket: h4dot*(1 - h1)/(h2*(h2*x + h4))",
                         expr::parse("h4dot*(1 - h1)/(h2*(h2*x + h4))", hs)});
      break;
    }
    case FormId::eq5:
      f.recipe = "gauge_energy(gauge_general(h1, h2, h4)) = -dPhi/dt";
      f.printed = instantiate(id, hs);
      f.canonical = variational::gauge_energy(phi);
      f.hints.push_back({"total derivative dPhi/dt", variational::lift_gauge(phi).body});
      f.hints.push_back({"velocity term h1*xdot/(h2*x + h4)", expr::parse("h1*xdot/(h2*x + h4)", hs)});
      break;
    case FormId::eq8a_lhs:
      f.recipe = "EL[nsl_general(set 1) - dPhi/dt] - d2Phi/dtdx";
      f.printed = instantiate(id, ctx.set1.symbols);
      f.canonical = forced_lhs(ctx.set1, phi);
      break;
    case FormId::eq8b_lhs:
      f.recipe = "EL[nsl_general(set 2) - dPhi/dt] - d2Phi/dtdx";
      f.printed = instantiate(id, ctx.set2.symbols);
      f.canonical = forced_lhs(ctx.set2, phi);
      break;
    case FormId::eq9:
      f.recipe = "d/dx of the printed gauge energy (route B)";
      f.printed = instantiate(id, hs);
      f.canonical = forces::force_from_gauge(phi, forces::Route::B).body;
      f.hints.push_back({"h4 terms (h1*h4dot - h1dot*h4)/(h2*x + h4)^2",
                         expr::parse("(h1*h4dot - h1dot*h4)/(h2*x + h4)^2", hs)});
      f.hints.push_back({"route A force -d2Phi/dtdx", forces::force_from_gauge(phi, forces::Route::A).body});
      break;
    case FormId::sec5_h4zero:
    case FormId::sec5_h4const: {
      const bool with_h4 = id == FormId::sec5_h4const;
      const expr::SymbolTable cs = constants_table(ctx, with_h4);
      f.recipe = with_h4 ? "explicit forcing function with h1 = c1, h2 = c2, h4 = c4"
                         : "explicit forcing function with h1 = c1, h2 = c2, h4 = 0";
      f.printed = instantiate(id, cs);
      const GaugeTriple ct{*cs.lookup("c1"), *cs.lookup("c2"), with_h4 ? *cs.lookup("c4") : Expr()};
      f.canonical = expr::simplify(forces::eq9_cleared(ct));
      break;
    }
  }
  return f;
}

// ---------------------------------------------------------------------------
// Relation search
// ---------------------------------------------------------------------------

namespace {

std::vector<Expr> guards_of(std::initializer_list<Expr> es) {
  std::set<Expr, expr::ExprLess> all;
  for (const auto& e : es) {
    for (const auto& g : expr::singular_subexpressions(e)) all.insert(g);
  }
  return {all.begin(), all.end()};
}

// Estimate k with lhs = k * rhs at the first sample where rhs is not small,
// then confirm on the whole sample set.
std::optional<double> proportional(const Expr& lhs, const Expr& rhs, const FuzzConfig& cfg) {
  const auto guards = guards_of({lhs, rhs});
  std::optional<double> k;
  for (std::size_t i = 0; i < cfg.samples && !k; ++i) {
    expr::draw_sample(cfg, i, guards, [&](const expr::Binding& b) {
      const double r = expr::evaluate(rhs, b);
      if (std::fabs(r) > 1e-3) k = expr::evaluate(lhs, b) / r;
    });
  }
  if (!k || !std::isfinite(*k) || *k == 0.0) return std::nullopt;
  // Report round numbers when the estimate is within rounding of one.
  const double rounded = std::round(*k * 1e9) / 1e9;
  if (std::fabs(rounded - *k) <= 1e-12 * std::max(1.0, std::fabs(*k))) k = rounded;
  if (!expr::equivalent(lhs, expr::constant(*k) * rhs, cfg).equivalent) return std::nullopt;
  return k;
}

std::string factor_text(const Expr& m) {
  const std::string s = expr::to_string(m);
  return m.kind() == expr::Kind::sum || m.kind() == expr::Kind::negation ? "(" + s + ")" : s;
}

std::string number(double k) {
  const double r = std::round(k * 1e9) / 1e9;
  return expr::format_number(std::fabs(r - k) < 1e-9 * std::max(1.0, std::fabs(k)) ? r : k);
}

}  // namespace

std::string find_relation(const Expr& lhs, const Expr& rhs, std::span<const Hint> hints, const FuzzConfig& base,
                          std::string_view lhs_name, std::string_view rhs_name) {
  const FuzzConfig cfg = base.with_samples(std::min<std::size_t>(base.samples, 200));
  const std::string L(lhs_name);
  const std::string R(rhs_name);
  std::ostringstream note;

  if (auto k = proportional(lhs, rhs, cfg)) {
    if (*k == -1.0) return L + " = -" + R + " (sign flip)";
    return L + " = " + number(*k) + " * " + R + " (constant factor)";
  }
  for (Var v : {Var::xdot, Var::x, Var::t}) {
    for (int n : {1, -1, 2, -2, 3, -3}) {
      const Expr m = expr::pow(expr::var(v), n);
      if (auto k = proportional(lhs, m * rhs, cfg)) {
        return L + " = " + number(*k) + " * " + factor_text(m) + " * " + R + " (power of " +
               std::string(expr::var_name(v)) + ")";
      }
    }
  }
  for (const auto& u : guards_of({lhs, rhs})) {
    if (u.kind() == expr::Kind::variable || u.kind() == expr::Kind::coefficient) continue;
    for (int n : {1, -1, 2, -2}) {
      const Expr m = expr::pow(u, n);
      if (auto k = proportional(lhs, m * rhs, cfg)) {
        return L + " = " + number(*k) + " * " + factor_text(m) + " * " + R + " (power of a denominator)";
      }
    }
  }
  for (const auto& h : hints) {
    if (auto k = proportional(lhs, h.term, cfg)) {
      return L + " = " + number(*k) + " * [" + h.label + "]";
    }
    if (auto k = proportional(lhs - rhs, h.term, cfg)) {
      return L + " - " + R + " = " + number(*k) + " * [" + h.label + "]";
    }
  }
  return "no simple relation found (sign, constant factor, monomial or denominator power, or listed terms)";
}

std::string describe_relation(const PrintedForm& form, const FuzzConfig& cfg) {
  return find_relation(form.printed, form.canonical, form.hints, cfg);
}

CheckReport cross_check(FormId id, const FuzzConfig& cfg, const FormContext& ctx) {
  const PrintedForm form = printed_form(id, ctx);
  const auto v = expr::equivalent(form.printed, form.canonical, cfg);
  CheckReport r;
  r.id = std::string(form_name(id));
  r.match = v.equivalent;
  r.max_residual = v.max_residual;
  r.seed = cfg.seed;
  r.samples = v.samples;
  r.epsilon = cfg.epsilon;
  if (!r.match) {
    r.witness = v.witness;
    r.note = describe_relation(form, cfg);
  } else {
    r.note = "printed form agrees with " + form.recipe;
  }
  return r;
}

nlohmann::json to_json(const expr::Witness& w) {
  nlohmann::json j;
  for (Var v : expr::kAllVars) {
    if (auto val = w.binding.get(v)) j[std::string(expr::var_name(v))] = *val;
  }
  j["lhs"] = w.lhs;
  j["rhs"] = w.rhs;
  j["residual"] = w.residual;
  return j;
}

nlohmann::json to_json(const CheckReport& r) {
  nlohmann::json j;
  j["id"] = r.id;
  j["verdict"] = r.match ? "match" : "mismatch";
  j["max_residual"] = r.max_residual;
  j["witness"] = r.witness ? to_json(*r.witness) : nlohmann::json(nullptr);
  j["note"] = r.note;
  j["seed"] = r.seed;
  j["samples"] = r.samples;
  j["epsilon"] = r.epsilon;
  return j;
}

}  // namespace gaugelab::catalog
