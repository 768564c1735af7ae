#include "gaugelab/galilean.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "gaugelab/catalog.hpp"
#include "gaugelab/evaluate.hpp"

namespace gaugelab::galilean {

using expr::Var;
using Params = std::map<std::string, double>;

void BoostParams::validate() const {
  if (!std::isfinite(V0)) throw std::invalid_argument("boost velocity must be finite");
}

BoostParams BoostParams::inverse() const {
  return {V0, direction == Direction::to_primed ? Direction::to_unprimed : Direction::to_primed};
}

Expr boost(const Expr& e, const BoostParams& p) {
  p.validate();
  if (p.V0 == 0.0) return e;
  const double v = p.direction == Direction::to_primed ? p.V0 : -p.V0;
  const Expr V = expr::constant(v);
  return expr::substitute(e, [&](Var var) {
    switch (var) {
      case Var::x: return expr::x() + V * expr::t();
      case Var::xdot: return expr::xdot() + V;
      default: return expr::var(var);
    }
  });
}

Expr translate(const Expr& e, double b) {
  if (!std::isfinite(b)) throw std::invalid_argument("translation must be finite");
  if (b == 0.0) return e;
  return expr::substitute(e, [&](Var var) { return var == Var::x ? expr::x() + expr::constant(b) : expr::var(var); });
}

namespace {

bool agree(double a, double b) { return std::fabs(a - b) <= 1e-9 * std::max({1.0, std::fabs(a), std::fabs(b)}); }

Expr inertia_1_body(const Params& p) {
  const auto set = catalog::CoefficientSet::inertia_1(p.at("C1"), p.at("C2"), p.at("a_o"), p.at("v_o"));
  return catalog::nsl_general(set).body;
}

}  // namespace

Template inertia_1_template(double C1, double C2, double a_o, double v_o) {
  Template t;
  t.name = "inertia-set-1";
  t.values = {{"C1", C1}, {"C2", C2}, {"a_o", a_o}, {"v_o", v_o}};
  t.build = inertia_1_body;
  t.first_stage = {"C2"};
  t.conditions = {
      {"(i)", "f' = f: a_o' = a_o",
       [](const Params& o, const Params& m, double) { return std::pair{m.at("a_o"), o.at("a_o")}; }},
      {"(i)", "f' = f: v_o' = v_o",
       [](const Params& o, const Params& m, double) { return std::pair{m.at("v_o"), o.at("v_o")}; }},
      {"(ii)", "C1' = C1", [](const Params& o, const Params& m, double) { return std::pair{m.at("C1"), o.at("C1")}; }},
      {"(iii)", "C2' + v_o V0 = C2",
       [](const Params& o, const Params& m, double V0) { return std::pair{m.at("C2") + o.at("v_o") * V0, o.at("C2")}; }},
  };
  inertia_1_body(t.values);  // validate
  return t;
}

Template standard_template() {
  Template t;
  t.name = "standard";
  t.build = [](const Params&) { return catalog::standard_inertia().body; };
  return t;
}

std::optional<Template> template_for(const variational::Lagrangian& L) {
  if (L.body == catalog::standard_inertia().body) return standard_template();
  const auto& p = L.parameters;
  if (p.size() == 4 && p.contains("C1") && p.contains("C2") && p.contains("a_o") && p.contains("v_o")) {
    auto t = inertia_1_template(p.at("C1"), p.at("C2"), p.at("a_o"), p.at("v_o"));
    if (t.instantiate() == L.body) return t;
  }
  return std::nullopt;
}

namespace {

// Fixed sample points and target values for the least-squares match.
struct Fit {
  std::vector<expr::Binding> points;
  std::vector<double> target;
  std::vector<double> scale;
  std::function<Expr(const Params&, double)> boosted;
  double V0 = 0.0;

  // Residuals of boost(template(p)) against the target; nullopt if singular.
  std::optional<Eigen::VectorXd> residual(const Params& p) const {
    Expr e;
    try {
      e = boosted(p, V0);
    } catch (const std::invalid_argument&) {
      return std::nullopt;
    }
    Eigen::VectorXd r(static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) {
      try {
        r[static_cast<Eigen::Index>(i)] = (expr::evaluate(e, points[i]) - target[i]) / scale[i];
      } catch (const expr::SingularPointError&) {
        return std::nullopt;
      }
    }
    return r;
  }
};

// Levenberg-Marquardt over the named free parameters, starting from `p`.
Params solve(const Fit& fit, Params p, const std::vector<std::string>& free) {
  if (free.empty()) return p;
  const auto n = static_cast<Eigen::Index>(free.size());
  auto r = fit.residual(p);
  if (!r) return p;
  double lambda = 1e-6;
  for (int iter = 0; iter < 100 && r->norm() > 1e-15; ++iter) {
    Eigen::MatrixXd J(r->size(), n);
    bool ok = true;
    for (Eigen::Index k = 0; k < n && ok; ++k) {
      const auto& name = free[static_cast<std::size_t>(k)];
      const double h = 1e-6 * std::max(1.0, std::fabs(p[name]));
      Params hi = p, lo = p;
      hi[name] += h;
      lo[name] -= h;
      const auto rh = fit.residual(hi), rl = fit.residual(lo);
      if (!rh || !rl) {
        ok = false;
        break;
      }
      J.col(k) = (*rh - *rl) / (2 * h);
    }
    if (!ok) break;
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * *r;
    bool improved = false;
    for (int tries = 0; tries < 20 && !improved; ++tries) {
      Eigen::MatrixXd M = JtJ;
      M.diagonal() += lambda * JtJ.diagonal().cwiseMax(1e-12);
      const Eigen::VectorXd step = M.ldlt().solve(-g);
      Params trial = p;
      for (Eigen::Index k = 0; k < n; ++k) trial[free[static_cast<std::size_t>(k)]] += step[k];
      const auto rt = fit.residual(trial);
      if (rt && rt->norm() < r->norm()) {
        p = std::move(trial);
        r = rt;
        lambda = std::max(lambda / 10, 1e-12);
        improved = true;
      } else {
        lambda *= 10;
      }
    }
    if (!improved) break;
  }
  return p;
}

double worst(const Eigen::VectorXd& r) { return r.size() ? r.cwiseAbs().maxCoeff() : 0.0; }

// Continuation in V0 from the identity: each increment starts from the
// previous match and is halved when the fit stalls, which keeps the path
// away from the poles that a single jump from p to p' may cross.
std::optional<Params> follow(Fit fit, const Params& start, const std::vector<std::string>& free, double V0,
                             double tol) {
  Params p = start;
  double done = 0.0;
  double step = V0;
  const double min_step = 1e-6 * std::max(1.0, std::fabs(V0));
  while (done != V0) {
    if (std::fabs(step) < min_step) return std::nullopt;
    const double next = std::fabs(V0 - done) <= std::fabs(step) ? V0 : done + step;
    fit.V0 = next;
    const Params q = solve(fit, p, free);
    const auto r = fit.residual(q);
    if (r && worst(*r) < tol) {
      p = q;
      done = next;
      step *= 2;
    } else {
      step /= 2;
    }
  }
  return p;
}

InvarianceReport failing(std::string name, double V0, std::string note) {
  InvarianceReport r;
  r.template_name = std::move(name);
  r.V0 = V0;
  r.note = std::move(note);
  ConditionResult c;
  c.label = "match";
  c.statement = "boost(template(p')) == template(p)";
  r.conditions.push_back(std::move(c));
  return r;
}

}  // namespace

InvarianceReport check_form_invariance(const Template& tpl, const BoostParams& p, const FuzzConfig& cfg) {
  p.validate();
  cfg.validate();
  const Expr target = tpl.instantiate();

  Fit fit;
  fit.boosted = [&](const Params& q, double v) { return boost(tpl.build(q), BoostParams{v, p.direction}); };
  fit.V0 = p.V0;
  std::set<Expr, expr::ExprLess> guard_set;
  for (const auto& g : expr::singular_subexpressions(target)) guard_set.insert(g);
  for (const auto& g : expr::singular_subexpressions(fit.boosted(tpl.values, p.V0))) guard_set.insert(g);
  const std::vector<Expr> guards(guard_set.begin(), guard_set.end());
  expr::for_each_sample(cfg, guards, [&](const expr::Binding& b) {
    const auto v = expr::evaluate_with_magnitude(target, b);
    fit.points.push_back(b);
    fit.target.push_back(v.value);
    fit.scale.push_back(v.magnitude > 0 ? v.magnitude : 1.0);
  });

  std::vector<std::string> all;
  for (const auto& [name, value] : tpl.values) all.push_back(name);
  const double tol = 0.1 * cfg.epsilon;
  std::string stage = "first stage";
  auto found = follow(fit, tpl.values, tpl.first_stage, p.V0, tol);
  if (!found && all.size() > tpl.first_stage.size()) {
    found = follow(fit, tpl.values, all, p.V0, tol);
    stage = "all parameters";
  }
  const Params matched = found ? *found : tpl.values;
  const auto verdict = expr::equivalent(fit.boosted(matched, p.V0), target, cfg);

  InvarianceReport r;
  r.template_name = tpl.name;
  r.V0 = p.V0;
  r.max_residual = verdict.max_residual;
  for (const auto& [name, value] : tpl.values) r.parameter_map[name] = {value, matched.at(name)};

  ConditionResult match;
  match.label = "match";
  match.statement = "boost(template(p')) == template(p)";
  match.holds = verdict.equivalent;
  match.lhs = verdict.max_residual;
  if (!verdict.equivalent) match.witness = verdict.witness;
  r.conditions.push_back(match);
  for (const auto& c : tpl.conditions) {
    ConditionResult cr;
    cr.label = c.label;
    cr.statement = c.statement;
    std::tie(cr.lhs, cr.rhs) = c.sides(tpl.values, matched, p.V0);
    cr.holds = verdict.equivalent && agree(cr.lhs, cr.rhs);
    r.conditions.push_back(std::move(cr));
  }
  r.holds = true;
  for (const auto& c : r.conditions) r.holds = r.holds && c.holds;

  std::ostringstream note;
  if (verdict.equivalent) {
    note << "matched (" << stage << ")";
  } else if (tpl.values.empty()) {
    note << "no parameter to relabel; boosted form differs from the template";
  } else {
    note << "no relabeling of {";
    bool first = true;
    for (const auto& n : all) note << (first ? "" : ", ") << n, first = false;
    note << "} reproduces the template";
  }
  r.note = note.str();
  return r;
}

InvarianceReport check_form_invariance(const variational::Lagrangian& L, const BoostParams& p, const FuzzConfig& cfg) {
  if (auto tpl = template_for(L)) return check_form_invariance(*tpl, p, cfg);
  return failing("none", p.V0, "non-matchable structure: no template with declared parameters fits this Lagrangian");
}

EomVerdict check_eom_invariance(const Expr& accel, const BoostParams& p, const FuzzConfig& cfg) {
  if (expr::depends_on(accel, Var::xddot)) throw std::invalid_argument("acceleration must not contain xddot");
  const auto v = expr::equivalent(boost(accel, p), accel, cfg);
  EomVerdict out;
  out.invariant = v.equivalent;
  out.V0 = p.V0;
  out.max_residual = v.max_residual;
  out.samples = v.samples;
  if (!v.equivalent) out.witness = v.witness;
  return out;
}

nlohmann::json to_json(const InvarianceReport& r) {
  nlohmann::json conditions = nlohmann::json::array();
  for (const auto& c : r.conditions) {
    nlohmann::json j{{"label", c.label}, {"statement", c.statement}, {"status", c.holds ? "holds" : "fails"}};
    if (c.label == "match") {
      j["max_residual"] = c.lhs;
    } else {
      j["lhs"] = c.lhs;
      j["rhs"] = c.rhs;
    }
    if (c.witness) j["witness"] = catalog::to_json(*c.witness);
    conditions.push_back(std::move(j));
  }
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [name, v] : r.parameter_map) params[name] = {{"original", v.first}, {"matched", v.second}};
  return {{"template", r.template_name}, {"V0", r.V0},           {"conditions", conditions},
          {"verdict", r.holds ? "holds" : "fails"},             {"parameter_map", params},
          {"max_residual", r.max_residual},                     {"note", r.note}};
}

nlohmann::json to_json(const EomVerdict& v) {
  nlohmann::json j{{"verdict", v.invariant ? "invariant" : "not-invariant"},
                   {"V0", v.V0},
                   {"max_residual", v.max_residual},
                   {"samples", v.samples}};
  if (v.witness) j["witness"] = catalog::to_json(*v.witness);
  return j;
}

}  // namespace gaugelab::galilean
