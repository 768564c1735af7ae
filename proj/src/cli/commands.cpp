#include "gaugelab/cli.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "gaugelab/calculus.hpp"
#include "gaugelab/galilean.hpp"
#include "gaugelab/parser.hpp"

namespace gaugelab::cli {

using nlohmann::json;
using variational::Lagrangian;
using variational::LagrangianKind;

namespace {

const std::set<std::string> kTopLevel = {"name",     "constants", "coefficients", "lagrangian", "gauge", "route",
                                         "equation", "acceleration", "integrator", "boost",    "samples"};

[[noreturn]] void fail(const std::string& what) { throw ConfigError(what); }

double number(const json& j, const char* key) {
  if (!j.contains(key)) fail(std::string("missing field '") + key + "'");
  if (!j[key].is_number()) fail(std::string("field '") + key + "' must be a number");
  return j[key].get<double>();
}

double number_or(const json& j, const char* key, double fallback) { return j.contains(key) ? number(j, key) : fallback; }

std::string text(const json& j, const char* key) {
  if (!j.contains(key)) fail(std::string("missing field '") + key + "'");
  if (!j[key].is_string()) fail(std::string("field '") + key + "' must be a string");
  return j[key].get<std::string>();
}

Expr expression(const json& j, const char* key, const expr::SymbolTable& symbols) {
  const std::string src = text(j, key);
  try {
    return expr::parse(src, symbols);
  } catch (const expr::ParseError& e) {
    fail(std::string("field '") + key + "': " + e.what());
  }
}

catalog::CoefficientSet parse_coefficients(const json& j, const expr::SymbolTable& symbols) {
  if (!j.is_object()) fail("'coefficients' must be an object");
  const std::string set = text(j, "set");
  if (set == "inertia-set-1") {
    return catalog::CoefficientSet::inertia_1(number(j, "C1"), number(j, "C2"), number(j, "a_o"), number(j, "v_o"));
  }
  if (set == "inertia-set-2") return catalog::CoefficientSet::inertia_2(number(j, "C3"));
  if (set == "custom") {
    return catalog::CoefficientSet::custom(expression(j, "g1", symbols), expression(j, "g2", symbols),
                                           expression(j, "g3", symbols));
  }
  fail("unknown coefficient set '" + set + "'");
}

LagrangianKind parse_kind(const std::string& s) {
  for (auto k : {LagrangianKind::standard, LagrangianKind::non_standard, LagrangianKind::null, LagrangianKind::total}) {
    if (variational::kind_name(k) == s) return k;
  }
  fail("unknown Lagrangian kind '" + s + "'");
}

Equation parse_equation(const std::string& s) {
  if (s == "lagrangian") return Equation::lagrangian;
  if (s == "force") return Equation::force;
  if (s == "effective") return Equation::effective;
  fail("unknown equation '" + s + "' (lagrangian, force, effective)");
}

}  // namespace

Scenario parse_scenario(const json& j) {
  if (!j.is_object()) fail("scenario must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kTopLevel.contains(key)) fail("unknown scenario field '" + key + "'");
  }
  Scenario s;
  try {
    if (j.contains("name")) s.name = text(j, "name");
    if (j.contains("constants")) {
      if (!j["constants"].is_object()) fail("'constants' must be an object");
      for (const auto& [name, value] : j["constants"].items()) {
        if (!value.is_number()) fail("constant '" + name + "' must be a number");
        s.constants[name] = value.get<double>();
        s.symbols.define(name, expr::constant(value.get<double>()));
      }
    }
    if (j.contains("coefficients")) {
      s.coefficients = parse_coefficients(j["coefficients"], s.symbols);
      for (const auto& [name, e] : s.coefficients->symbols.entries()) {
        if (!s.symbols.contains(name)) s.symbols.define(name, e.definition());
      }
    }
    if (j.contains("lagrangian")) {
      const json& L = j["lagrangian"];
      if (L == "standard") {
        s.lagrangian = catalog::standard_inertia();
      } else if (L == "nsl") {
        if (!s.coefficients) fail("lagrangian 'nsl' needs 'coefficients'");
        s.lagrangian = catalog::nsl_general(*s.coefficients);
      } else if (L.is_object()) {
        const auto kind = L.contains("kind") ? parse_kind(text(L, "kind")) : LagrangianKind::standard;
        s.lagrangian = Lagrangian::make(expression(L, "expression", s.symbols), kind, s.constants);
      } else {
        fail("'lagrangian' must be \"standard\", \"nsl\" or {expression, kind}");
      }
    }
    if (j.contains("gauge")) {
      const json& g = j["gauge"];
      if (!g.is_object()) fail("'gauge' must be an object");
      if (g.contains("phi")) {
        s.gauge = variational::GaugeFunction::make(expression(g, "phi", s.symbols));
      } else {
        s.gauge = catalog::gauge_general(expression(g, "h1", s.symbols), expression(g, "h2", s.symbols),
                                         expression(g, "h4", s.symbols));
        const auto hs = catalog::gauge_symbols(*s.gauge->triple);
        for (const auto& [name, e] : hs.entries()) s.symbols.define(name, e.definition());
      }
    }
    if (j.contains("route")) s.route = forces::parse_route(text(j, "route"));
    if (j.contains("equation")) s.equation = parse_equation(text(j, "equation"));
    if (j.contains("acceleration")) {
      s.acceleration = expression(j, "acceleration", s.symbols);
      if (j.contains("equation")) fail("give either 'equation' or 'acceleration'");
      s.equation = Equation::explicit_;
    }
    if (j.contains("integrator")) {
      const json& in = j["integrator"];
      if (!in.is_object()) fail("'integrator' must be an object");
      auto& c = s.integrator;
      if (in.contains("method")) c.method = dynamics::parse_method(text(in, "method"));
      c.step = number_or(in, "step", c.step);
      c.tolerance = number_or(in, "tolerance", c.tolerance);
      c.t0 = number_or(in, "t0", c.t0);
      c.t1 = number_or(in, "t1", c.t1);
      c.guard = number_or(in, "guard", c.guard);
      s.x0 = number_or(in, "x0", s.x0);
      s.v0 = number_or(in, "v0", s.v0);
      c.validate();
    }
    if (j.contains("boost")) {
      const json& b = j["boost"];
      if (!b.is_object() || !b.contains("V0")) fail("'boost' must be an object with 'V0'");
      s.boosts.clear();
      if (b["V0"].is_array()) {
        for (const auto& v : b["V0"]) {
          if (!v.is_number()) fail("'boost.V0' entries must be numbers");
          s.boosts.push_back(v.get<double>());
        }
      } else {
        s.boosts.push_back(number(b, "V0"));
      }
      if (s.boosts.empty()) fail("'boost.V0' is empty");
    }
    if (j.contains("samples")) {
      if (!j["samples"].is_number_unsigned() || j["samples"].get<std::size_t>() == 0) {
        fail("'samples' must be a positive integer");
      }
      s.samples = j["samples"].get<std::size_t>();
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  } catch (const std::domain_error& e) {
    fail(e.what());
  }
  return s;
}

Scenario load_scenario(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot read scenario '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    fail("scenario '" + path.string() + "' is not valid JSON: " + e.what());
  }
  Scenario s = parse_scenario(j);
  if (s.name.empty()) s.name = path.stem().string();
  return s;
}

forces::Route effective_route(const Scenario& s) {
  if (s.route) return *s.route;
  return s.gauge && s.gauge->triple ? forces::Route::eq9 : forces::Route::A;
}

Resolved resolve_equation(const Scenario& s) {
  Resolved r;
  auto route_force = [&] {
    if (!s.gauge) fail("equation '" + std::string(s.equation == Equation::force ? "force" : "effective") +
                       "' needs a 'gauge'");
    try {
      return forces::force_from_gauge(*s.gauge, effective_route(s));
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  };
  switch (s.equation) {
    case Equation::explicit_:
      r.acceleration = *s.acceleration;
      r.lagrangian = s.lagrangian;
      r.description = "xddot = acceleration";
      break;
    case Equation::lagrangian: {
      if (!s.lagrangian) fail("equation 'lagrangian' needs a 'lagrangian'");
      r.lagrangian = s.gauge ? forces::total_lagrangian(*s.lagrangian, *s.gauge) : *s.lagrangian;
      try {
        r.acceleration = variational::solve_for_acceleration(*r.lagrangian);
      } catch (const variational::DegenerateLagrangianError& e) {
        fail(std::string("no equation of motion: ") + e.what());
      }
      r.description = s.gauge ? "EL[L - dPhi/dt] = 0" : "EL[L] = 0";
      break;
    }
    case Equation::force: {
      r.acceleration = route_force().body;
      r.lagrangian = s.lagrangian;
      r.description = "xddot = F (" + std::string(forces::route_name(effective_route(s))) + ")";
      break;
    }
    case Equation::effective: {
      if (!s.coefficients || s.coefficients->id == catalog::SetId::custom) {
        fail("equation 'effective' needs inertia-set-1 or inertia-set-2 coefficients");
      }
      const int set = s.coefficients->id == catalog::SetId::inertia_1 ? 1 : 2;
      r.acceleration = forces::effective_force(route_force(), set, *s.coefficients).body;
      r.lagrangian = catalog::nsl_general(*s.coefficients);
      r.description = "xddot = F" + std::to_string(set) + " (" + std::string(forces::route_name(effective_route(s))) + ")";
      break;
    }
  }
  if (r.lagrangian) r.guards = expr::singular_subexpressions(r.lagrangian->body);
  return r;
}

void write_atomic(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

namespace {

std::string dump(const json& j) { return j.dump(2) + "\n"; }

Scenario scenario_of(const RunConfig& cfg, bool required) {
  Scenario s;
  if (cfg.scenario) {
    s = load_scenario(*cfg.scenario);
  } else if (required) {
    fail("this command needs --scenario");
  }
  if (cfg.route) s.route = *cfg.route;
  return s;
}

expr::FuzzConfig fuzz(const RunConfig& cfg, const Scenario& s) {
  expr::FuzzConfig f;
  f.seed = cfg.seed;
  f.samples = s.samples;
  return f;
}

// Wraps a command body: configuration problems become exit 2.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
  } catch (const fs::filesystem_error& e) {
    err << "config error: " << e.what() << "\n";
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
  }
  return exit_config;
}

struct Invariant {
  std::string name;
  bool passed = true;
  double worst = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

json to_json(const Invariant& v) {
  return {{"name", v.name},
          {"status", v.passed ? "pass" : "fail"},
          {"worst", v.worst},
          {"tolerance", v.tolerance},
          {"detail", v.detail}};
}

double max_abs(const Expr& e, const expr::FuzzConfig& cfg, std::span<const Expr> extra) {
  if (e.is_zero()) return 0.0;
  std::vector<Expr> guards = expr::singular_subexpressions(e);
  guards.insert(guards.end(), extra.begin(), extra.end());
  double worst = 0.0;
  expr::for_each_sample(cfg, guards, [&](const expr::Binding& b) {
    worst = std::max(worst, std::fabs(expr::evaluate(e, b)));
  });
  return worst;
}

std::vector<std::pair<std::string, variational::GaugeFunction>> verify_gauges() {
  using expr::parse;
  return {
      {"(h1/h2) ln|h2 x + h4|, generic",
       catalog::gauge_general(parse("1 + 0.5*t^2"), parse("2 + sin(t)"), parse("exp(0.5*t)"))},
      {"(h1/h2) ln|h2 x + h4|, polynomial",
       catalog::gauge_general(parse("t^3 - t + 2"), parse("1.5 + t^2"), parse("cos(t)"))},
      {"(a1/a2) ln|a2 x + a4|", catalog::null_basic(1, 2, 3).gauge},
      {"x t", variational::GaugeFunction::make(parse("x*t"))},
      {"x^2 sin t + e^t", variational::GaugeFunction::make(parse("x^2*sin(t) + exp(t)"))},
  };
}

std::vector<Invariant> verify_invariants(const expr::FuzzConfig& cfg) {
  std::vector<Invariant> out;
  const auto gauges = verify_gauges();

  Invariant null_id{"null-identity", true, 0.0, 1e-8, ""};
  Invariant energy_id{"gauge-energy", true, 0.0, 1e-10, ""};
  for (const auto& [label, phi] : gauges) {
    const auto lifted = variational::lift_gauge(phi);
    const auto v = variational::is_null(lifted, cfg.with_epsilon(null_id.tolerance));
    null_id.worst = std::max(null_id.worst, v.max_relative);
    if (!v.null) null_id.passed = false, null_id.detail += label + "; ";
    const auto e = expr::equivalent(variational::energy_function(lifted), variational::gauge_energy(phi),
                                    cfg.with_epsilon(energy_id.tolerance));
    energy_id.worst = std::max(energy_id.worst, e.max_residual);
    if (!e.equivalent) energy_id.passed = false, energy_id.detail += label + "; ";
  }
  out.push_back(null_id);
  out.push_back(energy_id);

  Invariant inertia{"inertia-recovery", true, 0.0, 1e-9, ""};
  for (const auto& set : {catalog::CoefficientSet::inertia_1(1, 1, 1, 1), catalog::CoefficientSet::inertia_1(0.5, -1, 2, 0.3),
                          catalog::CoefficientSet::inertia_2(1)}) {
    const auto L = catalog::nsl_general(set);
    const auto guards = expr::singular_subexpressions(L.body);
    const double w = max_abs(variational::solve_for_acceleration(L, cfg), cfg, guards);
    inertia.worst = std::max(inertia.worst, w);
    if (!(w < inertia.tolerance)) inertia.passed = false, inertia.detail += std::string(catalog::set_name(set.id)) + "; ";
  }
  out.push_back(inertia);

  Invariant rate{"energy-rate", true, 0.0, 1e-9, ""};
  const catalog::FormContext ctx;
  const auto phi = gauges.front().second;
  const std::vector<std::pair<std::string, Lagrangian>> lagrangians = {
      {"standard", catalog::standard_inertia()},
      {"nsl generic", catalog::nsl_general(ctx.nsl)},
      {"nsl set 1", catalog::nsl_general(ctx.set1)},
      {"nsl set 2", catalog::nsl_general(ctx.set2)},
      {"null basic", catalog::null_basic(1, 2, 3).lagrangian},
      {"lifted gauge", variational::lift_gauge(phi)},
      {"total set 1", forces::total_lagrangian(catalog::nsl_general(ctx.set1), phi)},
  };
  for (const auto& [label, L] : lagrangians) {
    const auto v = expr::vanishes(variational::energy_rate_residual(L).residual(), cfg.with_epsilon(rate.tolerance),
                                  expr::singular_subexpressions(L.body));
    rate.worst = std::max(rate.worst, v.max_relative);
    if (!v.vanishes) rate.passed = false, rate.detail += label + "; ";
  }
  out.push_back(rate);

  Invariant constant{"route-A-constant-coefficients", true, 0.0, 0.0, ""};
  const auto F = forces::force_from_gauge(catalog::gauge_general(expr::parse("2"), expr::parse("3"), expr::parse("-1")),
                                          forces::Route::A);
  constant.passed = F.body.is_zero();
  if (!constant.passed) constant.detail = expr::to_string(F.body);
  out.push_back(constant);
  return out;
}

}  // namespace

int cmd_verify(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = scenario_of(cfg, false);
    const auto fz = fuzz(cfg, s);
    json forms = json::array();
    std::size_t mismatches = 0;
    for (auto id : catalog::all_form_ids()) {
      const auto report = catalog::cross_check(id, fz);
      write_atomic(cfg.out / "reports" / (report.id + ".json"), dump(catalog::to_json(report)));
      log << report.id << ": " << (report.match ? "match" : "mismatch") << " (max residual "
          << expr::format_number(report.max_residual) << ")\n";
      if (!report.match) ++mismatches;
      forms.push_back({{"id", report.id}, {"verdict", report.match ? "match" : "mismatch"}});
    }
    json invariants = json::array();
    bool all_pass = true;
    for (const auto& inv : verify_invariants(fz)) {
      log << inv.name << ": " << (inv.passed ? "pass" : "FAIL") << " (worst " << expr::format_number(inv.worst) << ")\n";
      all_pass = all_pass && inv.passed;
      invariants.push_back(to_json(inv));
    }
    int code = all_pass ? exit_ok : exit_invariant;
    if (cfg.strict && mismatches > 0) code = exit_invariant;
    const json summary{{"seed", cfg.seed},         {"samples", fz.samples}, {"strict", cfg.strict},
                       {"forms", forms},           {"mismatches", mismatches}, {"invariants", invariants},
                       {"exit", code}};
    write_atomic(cfg.out / "summary.json", dump(summary));
    return code;
  });
}

int cmd_derive(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = scenario_of(cfg, true);
    if (!s.lagrangian && !s.gauge && !s.acceleration) fail("scenario needs a 'lagrangian', 'gauge' or 'acceleration'");
    const auto fz = fuzz(cfg, s);
    json j{{"scenario", s.name}};
    auto emit = [&](const std::string& key, const Expr& e) {
      const std::string text = expr::to_string(e);
      log << key << " = " << text << "\n";
      j[key] = text;
    };
    if (s.lagrangian) {
      const Lagrangian L = s.gauge ? forces::total_lagrangian(*s.lagrangian, *s.gauge) : *s.lagrangian;
      j["kind"] = variational::kind_name(L.kind);
      emit("L", L.body);
      const auto null = variational::is_null(L, fz);
      // A null Lagrangian's residual is printed as the 0 it is verified to be.
      emit("EL", null.null ? Expr() : expr::simplify(variational::euler_lagrange(L).residual()));
      j["null"] = null.null;
      emit("energy", variational::energy_function(L));
      if (!null.null) {
        try {
          emit("acceleration", variational::solve_for_acceleration(L, fz));
        } catch (const variational::DegenerateLagrangianError& e) {
          log << "acceleration: none (" << e.what() << ")\n";
          j["acceleration"] = nullptr;
        }
      }
    }
    if (s.gauge) {
      emit("Phi", s.gauge->body);
      emit("gauge_energy", variational::gauge_energy(*s.gauge));
      forces::ForceLaw F;
      try {
        F = forces::force_from_gauge(*s.gauge, effective_route(s));
      } catch (const std::invalid_argument& e) {
        fail(e.what());
      }
      F.classification = forces::classify(F, fz);
      emit("force", F.body);
      j["route"] = forces::route_name(effective_route(s));
      const json flags = forces::to_json(*F.classification)["flags"];
      j["classification"] = forces::to_json(*F.classification);
      log << "flags =";
      for (const auto& f : flags) log << " " << f.get<std::string>();
      log << (F.classification->dissipative ? " (dissipative)" : "") << "\n";
    }
    if (s.acceleration) emit("acceleration", *s.acceleration);
    write_atomic(cfg.out / "derive.json", dump(j));
    return exit_ok;
  });
}

int cmd_simulate(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = scenario_of(cfg, true);
    const Resolved r = resolve_equation(s);
    log << "equation: " << r.description << "\n";
    log << "xddot = " << expr::to_string(r.acceleration) << "\n";

    dynamics::Trajectory traj;
    try {
      traj = dynamics::integrate(r.acceleration, s.x0, s.v0, s.integrator, r.guards);
    } catch (const dynamics::ImmediateSingularityError& e) {
      traj.integrator = std::string(dynamics::method_name(s.integrator.method));
      traj.termination = dynamics::Termination::singularity;
      traj.events.push_back(e.event());
    }
    std::ostringstream csv;
    dynamics::write_csv(csv, traj);
    write_atomic(cfg.out / "trajectory.csv", csv.str());

    json j{{"scenario", s.name},
           {"equation", r.description},
           {"acceleration", expr::to_string(r.acceleration)},
           {"integrator", dynamics::method_name(s.integrator.method)},
           {"step_policy", traj.step_policy},
           {"samples", traj.samples.size()},
           {"termination", dynamics::termination_name(traj.termination)}};
    json events = json::array();
    for (const auto& e : traj.events) events.push_back({{"t", e.t}, {"denominator", e.denominator}, {"value", e.value}});
    j["events"] = events;

    int code = exit_ok;
    if (r.lagrangian && !traj.samples.empty()) {
      const auto rows = dynamics::diagnostics(traj, *r.lagrangian, variational::energy_function(*r.lagrangian),
                                              r.acceleration);
      std::ostringstream d;
      dynamics::write_diagnostics_csv(d, rows);
      write_atomic(cfg.out / "diagnostics.csv", d.str());
      double worst = 0.0;
      for (const auto& row : rows) worst = std::max(worst, std::fabs(row.el_residual));
      j["max_el_residual"] = worst;
      log << "max EL residual: " << expr::format_number(worst) << "\n";
      // Only an equation derived from the Lagrangian is expected to satisfy it.
      if (s.equation == Equation::lagrangian && !(worst < 1e-6)) code = exit_invariant;
    }
    if (traj.termination == dynamics::Termination::singularity) {
      const auto& e = traj.events.back();
      err << "singularity at t = " << expr::format_number(e.t) << ": " << e.denominator << " -> "
          << expr::format_number(e.value) << "\n";
      code = exit_singularity;
    }
    log << "termination: " << dynamics::termination_name(traj.termination) << " after " << traj.samples.size()
        << " samples\n";
    j["exit"] = code;
    write_atomic(cfg.out / "simulate.json", dump(j));
    return code;
  });
}

int cmd_boost(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = scenario_of(cfg, true);
    const auto fz = fuzz(cfg, s);
    std::optional<Resolved> eom;
    if (s.equation != Equation::lagrangian || s.lagrangian) eom = resolve_equation(s);
    bool all_hold = true;
    json runs = json::array();
    for (double V0 : s.boosts) {
      const galilean::BoostParams p{V0};
      json run{{"V0", V0}};
      if (s.lagrangian && !s.gauge) {
        const auto report = galilean::check_form_invariance(*s.lagrangian, p);
        log << "V0 = " << expr::format_number(V0) << ": form " << (report.holds ? "holds" : "fails");
        if (report.parameter_map.contains("C2")) {
          log << " (C2' = " << expr::format_number(report.parameter_map.at("C2").second) << ")";
        }
        log << "\n";
        all_hold = all_hold && report.holds;
        run["form"] = galilean::to_json(report);
      }
      if (eom) {
        const auto v = galilean::check_eom_invariance(eom->acceleration, p, fz);
        log << "V0 = " << expr::format_number(V0) << ": equation of motion "
            << (v.invariant ? "invariant" : "not invariant") << "\n";
        all_hold = all_hold && v.invariant;
        run["eom"] = galilean::to_json(v);
        run["eom"]["acceleration"] = expr::to_string(eom->acceleration);
      }
      runs.push_back(run);
    }
    const json j{{"scenario", s.name}, {"runs", runs}};
    write_atomic(cfg.out / "boost.json", dump(j));
    return cfg.strict && !all_hold ? exit_invariant : exit_ok;
  });
}

}  // namespace gaugelab::cli
