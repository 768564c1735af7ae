#include "gaugelab/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <cmath>
#include <optional>
#include <set>

#include "gaugelab/calculus.hpp"
#include "gaugelab/evaluate.hpp"
#include "gaugelab/parser.hpp"

namespace gaugelab::dynamics {

using expr::Binding;
using expr::Var;

std::string_view method_name(Method m) { return m == Method::rk4 ? "rk4" : "adaptive"; }

Method parse_method(std::string_view s) {
  if (s == "rk4") return Method::rk4;
  if (s == "adaptive" || s == "dopri5") return Method::adaptive;
  throw std::invalid_argument("unknown integrator '" + std::string(s) + "' (expected rk4 or adaptive)");
}

void IntegratorConfig::validate() const {
  if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("integrator step must be positive");
  if (!(tolerance > 0.0)) throw std::invalid_argument("integrator tolerance must be positive");
  if (!(guard > 0.0)) throw std::invalid_argument("denominator guard must be positive");
  if (!(t1 > t0) || !std::isfinite(t0) || !std::isfinite(t1)) throw std::invalid_argument("time span is empty");
  if (max_steps == 0) throw std::invalid_argument("max_steps must be positive");
}

std::string_view termination_name(Termination t) {
  switch (t) {
    case Termination::completed: return "completed";
    case Termination::singularity: return "singularity";
    case Termination::step_underflow: return "step-underflow";
    case Termination::step_limit: return "step-limit";
  }
  return "";
}

namespace {

using State = std::array<double, 2>;  // x, xdot

struct Failure {
  std::string denominator;
  double value = 0.0;
};

class Field {
 public:
  Field(const Expr& accel, std::span<const Expr> extra, double guard) : accel_(accel), guard_(guard) {
    std::set<Expr, expr::ExprLess> all;
    for (const auto& g : expr::singular_subexpressions(accel)) all.insert(g);
    for (const auto& e : extra) all.insert(e);
    guards_.assign(all.begin(), all.end());
  }

  // Record guard signs at the start of a step; a stage where any guard has
  // changed sign has jumped across a zero even if it never came within the
  // guard distance.
  std::optional<Failure> anchor(double t, const State& y) {
    signs_.clear();
    for (const auto& g : guards_) {
      const auto v = value(g, t, y);
      if (!v) return Failure{expr::to_string(g), 0.0};
      if (std::fabs(*v) < guard_) return Failure{expr::to_string(g), *v};
      signs_.push_back(std::signbit(*v));
    }
    return std::nullopt;
  }

  // First violated guard at (t, y), if any.
  std::optional<Failure> check(double t, const State& y) const {
    for (std::size_t i = 0; i < guards_.size(); ++i) {
      const auto v = value(guards_[i], t, y);
      if (!v) return Failure{expr::to_string(guards_[i]), 0.0};
      if (std::fabs(*v) < guard_ || (i < signs_.size() && std::signbit(*v) != signs_[i])) {
        return Failure{expr::to_string(guards_[i]), *v};
      }
    }
    return std::nullopt;
  }

  // Derivative, or the failure that prevents evaluating it.
  std::optional<Failure> eval(double t, const State& y, State& dy) const {
    if (auto f = check(t, y)) return f;
    try {
      dy = {y[1], expr::evaluate(accel_, Binding(t, y[0], y[1], 0.0))};
    } catch (const expr::SingularPointError& e) {
      return Failure{e.subexpression(), 0.0};
    }
    return std::nullopt;
  }

 private:
  static std::optional<double> value(const Expr& g, double t, const State& y) {
    try {
      return expr::evaluate(g, Binding(t, y[0], y[1], 0.0));
    } catch (const expr::SingularPointError&) {
      return std::nullopt;
    }
  }

  Expr accel_;
  double guard_;
  std::vector<Expr> guards_;
  std::vector<bool> signs_;
};

State axpy(const State& y, double h, const State& k) { return {y[0] + h * k[0], y[1] + h * k[1]}; }

std::optional<Failure> rk4_step(Field& f, double t, const State& y, double h, State& out) {
  if (auto e = f.anchor(t, y)) return e;
  State k1, k2, k3, k4;
  if (auto e = f.eval(t, y, k1)) return e;
  if (auto e = f.eval(t + h / 2, axpy(y, h / 2, k1), k2)) return e;
  if (auto e = f.eval(t + h / 2, axpy(y, h / 2, k2), k3)) return e;
  if (auto e = f.eval(t + h, axpy(y, h, k3), k4)) return e;
  for (int i = 0; i < 2; ++i) out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  if (!std::isfinite(out[0]) || !std::isfinite(out[1])) return Failure{"non-finite state", 0.0};
  return f.check(t + h, out);
}

// Dormand-Prince 5(4). Writes the 5th-order solution and an error estimate.
std::optional<Failure> dopri_step(Field& f, double t, const State& y, double h, State& out, State& err) {
  if (auto e = f.anchor(t, y)) return e;
  static constexpr double c[7] = {0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1, 1};
  static constexpr double a[7][6] = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
      {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
  };
  static constexpr double b5[7] = {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0};
  static constexpr double b4[7] = {5179.0 / 57600,    0,           7571.0 / 16695, 393.0 / 640,
                                   -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};
  State k[7];
  for (int s = 0; s < 7; ++s) {
    State ys = y;
    for (int j = 0; j < s; ++j) ys = axpy(ys, h * a[s][j], k[j]);
    if (auto e = f.eval(t + c[s] * h, ys, k[s])) return e;
  }
  for (int i = 0; i < 2; ++i) {
    double hi5 = 0.0, hi4 = 0.0;
    for (int s = 0; s < 7; ++s) {
      hi5 += b5[s] * k[s][i];
      hi4 += b4[s] * k[s][i];
    }
    out[i] = y[i] + h * hi5;
    err[i] = h * (hi5 - hi4);
  }
  if (!std::isfinite(out[0]) || !std::isfinite(out[1])) return Failure{"non-finite state", 0.0};
  return f.check(t + h, out);
}

}  // namespace

Trajectory integrate(const Expr& accel, double x0, double v0, const IntegratorConfig& cfg,
                     std::span<const Expr> extra_guards) {
  cfg.validate();
  if (expr::depends_on(accel, Var::xddot)) throw std::invalid_argument("acceleration must not contain xddot");
  Field field(accel, extra_guards, cfg.guard);

  State y{x0, v0};
  double t = cfg.t0;
  State probe;
  if (auto f = field.anchor(t, y); f || (f = field.eval(t, y, probe))) throw ImmediateSingularityError({t, f->denominator, f->value});

  Trajectory traj;
  traj.integrator = std::string(method_name(cfg.method));
  traj.samples.push_back({t, y[0], y[1]});
  // Bisection stops once the step is this small relative to the span.
  const double h_min = 1e-14 * std::max({1.0, std::fabs(cfg.t0), std::fabs(cfg.t1)});
  const double span = cfg.t1 - cfg.t0;

  if (cfg.method == Method::rk4) {
    traj.step_policy = "fixed step " + expr::format_number(cfg.step) + ", halved on guard failure";
    // Grid times are computed as t0 + k*step to avoid drift.
    const auto n = static_cast<std::size_t>(std::ceil(span / cfg.step - 1e-9));
    std::size_t steps = 0;
    for (std::size_t k = 1; k <= n; ++k) {
      const double target = k == n ? cfg.t1 : cfg.t0 + static_cast<double>(k) * cfg.step;
      while (t < target) {
        double h = target - t;
        State next;
        std::optional<Failure> fail;
        while ((fail = rk4_step(field, t, y, h, next)) && h > h_min) h /= 2;
        if (fail) {
          traj.events.push_back({t, fail->denominator, fail->value});
          traj.termination = Termination::singularity;
          return traj;
        }
        t = (h == target - t) ? target : t + h;
        y = next;
        traj.samples.push_back({t, y[0], y[1]});
        if (++steps >= cfg.max_steps) {
          traj.termination = Termination::step_limit;
          return traj;
        }
      }
    }
    return traj;
  }

  traj.step_policy = "Dormand-Prince 5(4), tolerance " + expr::format_number(cfg.tolerance);
  double h = std::min(cfg.step, span);
  std::size_t steps = 0;
  while (t < cfg.t1) {
    h = std::min(h, cfg.t1 - t);
    State next, err;
    if (auto fail = dopri_step(field, t, y, h, next, err)) {
      if (h <= h_min) {
        traj.events.push_back({t, fail->denominator, fail->value});
        traj.termination = Termination::singularity;
        return traj;
      }
      h /= 2;
      continue;
    }
    double norm = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double scale = cfg.tolerance * (1.0 + std::max(std::fabs(y[i]), std::fabs(next[i])));
      norm = std::max(norm, std::fabs(err[i]) / scale);
    }
    if (norm <= 1.0) {
      t = (h == cfg.t1 - t) ? cfg.t1 : t + h;
      y = next;
      traj.samples.push_back({t, y[0], y[1]});
      if (++steps >= cfg.max_steps) {
        traj.termination = Termination::step_limit;
        return traj;
      }
    }
    const double factor = norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
    h *= factor;
    if (h < h_min) {
      traj.termination = Termination::step_underflow;
      return traj;
    }
  }
  return traj;
}

namespace {

void put(std::ostream& os, double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  os.write(buf, n);
}

}  // namespace

void write_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,x,xdot\n";
  for (const auto& s : traj.samples) {
    put(os, s.t);
    os << ',';
    put(os, s.x);
    os << ',';
    put(os, s.xdot);
    os << '\n';
  }
  for (const auto& e : traj.events) {
    os << "#event,";
    put(os, e.t);
    os << ',' << e.denominator << ',';
    put(os, e.value);
    os << '\n';
  }
}

std::vector<DiagnosticRow> diagnostics(const Trajectory& traj, const variational::Lagrangian& L, const Expr& energy,
                                       const Expr& accel) {
  const auto el = variational::euler_lagrange(L);
  const Expr dldt = expr::simplify(expr::partial(L.body, Var::t));
  std::vector<DiagnosticRow> rows;
  rows.reserve(traj.samples.size());
  for (const auto& s : traj.samples) {
    try {
      Binding b(s.t, s.x, s.xdot, 0.0);
      const double a = expr::evaluate(accel, b);
      b.set(Var::xddot, a);
      rows.push_back({s.t, expr::evaluate(energy, b), expr::evaluate(dldt, b),
                      expr::evaluate(el.A, b) * a + expr::evaluate(el.B, b)});
    } catch (const expr::SingularPointError&) {
      continue;
    }
  }
  return rows;
}

void write_diagnostics_csv(std::ostream& os, std::span<const DiagnosticRow> rows) {
  os << "t,energy,dL_dt,el_residual\n";
  for (const auto& r : rows) {
    put(os, r.t);
    os << ',';
    put(os, r.energy);
    os << ',';
    put(os, r.explicit_time);
    os << ',';
    put(os, r.el_residual);
    os << '\n';
  }
}

}  // namespace gaugelab::dynamics
