#include "gaugelab/forces.hpp"

#include <cmath>
#include <set>

#include "gaugelab/calculus.hpp"

namespace gaugelab::forces {

using expr::Var;

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::route_a: return "route-A";
    case Provenance::route_b: return "route-B";
    case Provenance::printed_eq9: return "printed-eq9";
    case Provenance::effective_f1: return "effective-F1";
    case Provenance::effective_f2: return "effective-F2";
    case Provenance::special_case: return "special-case";
  }
  return "";
}

std::string_view route_name(Route r) {
  switch (r) {
    case Route::A: return "A";
    case Route::B: return "B";
    case Route::eq9: return "eq9";
  }
  return "";
}

Route parse_route(std::string_view s) {
  if (s == "A" || s == "a") return Route::A;
  if (s == "B" || s == "b") return Route::B;
  if (s == "eq9" || s == "printed-eq9") return Route::eq9;
  throw std::invalid_argument("unknown force route '" + std::string(s) + "' (expected A, B or eq9)");
}

namespace {

bool identically_zero(const Expr& e) { return expr::vanishes(e, FuzzConfig{}.with_samples(64)).vanishes; }

Expr dt(const Expr& h) { return expr::simplify(expr::partial(h, Var::t)); }

}  // namespace

Expr eq9_cleared(const GaugeTriple& tr) {
  const Expr& h1 = tr.h1;
  const Expr& h2 = tr.h2;
  const Expr& h4 = tr.h4;
  const Expr num = expr::sum({
      h1 * h2 * expr::xdot(),
      (h1 * dt(h2) - h2 * dt(h1)) * expr::x(),
      -(h1 * dt(h4) - h4 * dt(h1)),
  });
  return num / expr::pow(h2 * expr::x() + h4, 2);
}

ForceLaw printed_eq9_force(const GaugeTriple& triple) {
  ForceLaw F;
  F.provenance = Provenance::printed_eq9;
  const bool h2_zero = identically_zero(triple.h2);
  const bool h4_zero = identically_zero(triple.h4);
  if (h2_zero || h4_zero) {
    // Literal zeros let simplify drop the terms the vanishing coefficient multiplies.
    const GaugeTriple cleared{triple.h1, h2_zero ? Expr() : triple.h2, h4_zero ? Expr() : triple.h4};
    F.body = expr::simplify(eq9_cleared(cleared));
    F.source = "explicit forcing function, h2/h4 denominators cleared";
  } else {
    F.body = catalog::instantiate(catalog::FormId::eq9, catalog::gauge_symbols(triple));
    F.source = "explicit forcing function";
  }
  return F;
}

ForceLaw force_from_gauge(const GaugeFunction& phi, Route route) {
  ForceLaw F;
  switch (route) {
    case Route::A:
      F.provenance = Provenance::route_a;
      F.body = expr::simplify(-expr::partial(expr::partial(phi.body, Var::t), Var::x));
      F.source = "-d2Phi/dtdx";
      return F;
    case Route::B: {
      if (!phi.triple) throw std::invalid_argument("route B needs a gauge built from (h1, h2, h4)");
      const Expr e = catalog::instantiate(catalog::FormId::eq5, catalog::gauge_symbols(*phi.triple));
      F.provenance = Provenance::route_b;
      F.body = expr::simplify(expr::partial(e, Var::x));
      F.source = "dE/dx of the printed gauge energy";
      return F;
    }
    case Route::eq9:
      if (!phi.triple) throw std::invalid_argument("route eq9 needs a gauge built from (h1, h2, h4)");
      return printed_eq9_force(*phi.triple);
  }
  return F;
}

Lagrangian total_lagrangian(const Lagrangian& lns, const GaugeFunction& phi) {
  Expr body = expr::simplify(lns.body - expr::partial(phi.body, Var::t));
  return Lagrangian::make(std::move(body), variational::LagrangianKind::total, lns.parameters);
}

ForceLaw effective_force(const ForceLaw& F, int set, const catalog::CoefficientSet& c) {
  ForceLaw out;
  out.source = std::string(provenance_name(F.provenance)) + " force, " + std::string(catalog::set_name(c.id));
  if (set == 1 && c.id == catalog::SetId::inertia_1) {
    const Expr D = c.symbol("f") * expr::xdot() - c.symbol("a_o") * expr::x() + c.symbol("C2");
    out.body = expr::simplify(F.body * c.symbol("C1") * expr::pow(D, 3));
    out.provenance = Provenance::effective_f1;
  } else if (set == 2 && c.id == catalog::SetId::inertia_2) {
    out.body = expr::simplify(F.body * c.symbol("C3") * expr::pow(expr::xdot(), 2) / expr::constant(2.0));
    out.provenance = Provenance::effective_f2;
  } else {
    throw std::invalid_argument("effective force: set " + std::to_string(set) + " does not match coefficients " +
                                std::string(catalog::set_name(c.id)));
  }
  return out;
}

EffectiveCheck check_effective_force(const GaugeFunction& phi, int set, const catalog::CoefficientSet& coeffs,
                                     const FuzzConfig& cfg) {
  EffectiveCheck r;
  r.effective = effective_force(force_from_gauge(phi, Route::A), set, coeffs).body;
  r.acceleration = variational::solve_for_acceleration(total_lagrangian(catalog::nsl_general(coeffs), phi), cfg);
  const auto v = expr::equivalent(r.effective, r.acceleration, cfg);
  r.equal = v.equivalent;
  r.max_residual = v.max_residual;
  r.witness = v.witness;
  r.note = r.equal ? "effective force equals -B/A"
                   : catalog::find_relation(r.effective, r.acceleration, {}, cfg, "F_eff", "-B/A");
  return r;
}

// ---------------------------------------------------------------------------

Classification classify(const ForceLaw& F, const FuzzConfig& cfg) {
  Classification c;
  if (expr::vanishes(F.body, cfg).vanishes) {
    c.zero = true;
    c.samples = cfg.samples;
    return c;
  }
  const auto guards = expr::singular_subexpressions(F.body);
  constexpr Var kVaried[] = {Var::t, Var::x, Var::xdot};
  std::size_t hits[3] = {0, 0, 0};
  std::uint64_t index = 0;  // counts attempts, so a rejected pairing is not retried

  // Each sample pairs the base point with one re-drawn value per variable.
  c.samples = expr::for_each_sample(cfg, guards, [&](const expr::Binding& b) {
    const std::uint64_t draw = index++;
    const auto base = expr::evaluate_with_magnitude(F.body, b);
    bool changed[3] = {false, false, false};
    for (int k = 0; k < 3; ++k) {
      const Var v = kVaried[k];
      const auto slot = static_cast<std::size_t>(v);
      expr::Binding moved = b;
      moved.set(v, cfg.box[slot].map(expr::unit_draw(cfg.seed, draw, 0, 4 + slot)));
      for (const auto& g : guards) {
        if (std::fabs(expr::evaluate(g, moved)) < cfg.delta) {
          throw expr::SingularPointError("varied point hits the guard", expr::to_string(g));
        }
      }
      changed[k] = expr::relative_residual(base, expr::evaluate_with_magnitude(F.body, moved)) >= cfg.epsilon;
    }
    for (int k = 0; k < 3; ++k) hits[k] += changed[k] ? 1 : 0;
  });
  const double n = static_cast<double>(c.samples);
  c.time_fraction = static_cast<double>(hits[0]) / n;
  c.position_fraction = static_cast<double>(hits[1]) / n;
  c.velocity_fraction = static_cast<double>(hits[2]) / n;
  c.position_dependent = hits[1] > 0;
  c.velocity_dependent = hits[2] > 0;
  c.time_only = hits[0] > 0 && !c.position_dependent && !c.velocity_dependent;
  c.dissipative = c.velocity_dependent;
  return c;
}

nlohmann::json to_json(const Classification& c) {
  nlohmann::json flags = nlohmann::json::array();
  if (c.zero) flags.push_back("zero");
  if (c.time_only) flags.push_back("time-only");
  if (c.position_dependent) flags.push_back("position-dependent");
  if (c.velocity_dependent) flags.push_back("velocity-dependent");
  return {{"flags", flags},
          {"dissipative", c.dissipative},
          {"velocity_fraction", c.velocity_fraction},
          {"position_fraction", c.position_fraction},
          {"time_fraction", c.time_fraction},
          {"samples", c.samples}};
}

nlohmann::json to_json(const ForceLaw& F) {
  nlohmann::json j{{"provenance", provenance_name(F.provenance)},
                   {"expression", expr::to_string(F.body)},
                   {"source", F.source}};
  j["classification"] = F.classification ? to_json(*F.classification) : nlohmann::json(nullptr);
  return j;
}

}  // namespace gaugelab::forces
