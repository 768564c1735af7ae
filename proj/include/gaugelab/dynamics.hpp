// Integration of xddot = a(xdot, x, t) with denominator guards.
#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gaugelab/expr.hpp"
#include "gaugelab/variational.hpp"

namespace gaugelab::dynamics {

using expr::Expr;

enum class Method { rk4, adaptive };

std::string_view method_name(Method m);
/// "rk4" or "adaptive"; throws std::invalid_argument.
Method parse_method(std::string_view s);

struct IntegratorConfig {
  Method method = Method::rk4;
  /// Fixed step for rk4, initial step for adaptive.
  double step = 1e-3;
  /// Absolute and relative tolerance of the adaptive pair.
  double tolerance = 1e-9;
  double t0 = 0.0;
  double t1 = 10.0;
  /// A step fails when any guarded denominator drops below this in magnitude.
  double guard = 1e-6;
  std::size_t max_steps = 50'000'000;

  void validate() const;
};

enum class Termination { completed, singularity, step_underflow, step_limit };

std::string_view termination_name(Termination t);

struct SingularityEvent {
  double t = 0.0;
  std::string denominator;
  double value = 0.0;
};

struct Sample {
  double t = 0.0;
  double x = 0.0;
  double xdot = 0.0;
};

struct Trajectory {
  std::vector<Sample> samples;
  std::string integrator;
  std::string step_policy;
  Termination termination = Termination::completed;
  std::vector<SingularityEvent> events;
};

/// The initial point already violates a guard.
class ImmediateSingularityError : public std::runtime_error {
 public:
  explicit ImmediateSingularityError(SingularityEvent e)
      : std::runtime_error("singular at the initial point: " + e.denominator), event_(std::move(e)) {}
  const SingularityEvent& event() const { return event_; }

 private:
  SingularityEvent event_;
};

/// Integrate from (t0, x0, v0). Guards are the singular subexpressions of
/// `accel` plus `extra_guards` (typically those of the Lagrangian the
/// acceleration came from). A failing step is halved until it succeeds or
/// becomes negligible, at which point a singularity event ends the run.
Trajectory integrate(const Expr& accel, double x0, double v0, const IntegratorConfig& cfg,
                     std::span<const Expr> extra_guards = {});

/// Header "t,x,xdot", 17 significant digits, events as "#event,t,denominator,value".
void write_csv(std::ostream& os, const Trajectory& traj);

struct DiagnosticRow {
  double t = 0.0;
  double energy = 0.0;
  double explicit_time = 0.0;  // partial L / partial t
  double el_residual = 0.0;    // A xddot + B with xddot from accel
};

/// Per-sample energy, explicit time dependence of L and Euler-Lagrange
/// residual. Samples where any of them is singular are skipped.
std::vector<DiagnosticRow> diagnostics(const Trajectory& traj, const variational::Lagrangian& L, const Expr& energy,
                                       const Expr& accel);

void write_diagnostics_csv(std::ostream& os, std::span<const DiagnosticRow> rows);

}  // namespace gaugelab::dynamics
