// Euler-Lagrange calculus for first-order Lagrangians L(t, x, xdot).
#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "gaugelab/expr.hpp"
#include "gaugelab/fuzz.hpp"

namespace gaugelab::variational {

using expr::Expr;
using expr::FuzzConfig;

enum class LagrangianKind { standard, non_standard, null, total };

std::string_view kind_name(LagrangianKind kind);

struct Lagrangian {
  Expr body;
  LagrangianKind kind = LagrangianKind::standard;
  /// Numeric constants the body was instantiated with (C1, a_o, ...).
  std::map<std::string, double> parameters;

  /// Throws std::invalid_argument if body contains xddot.
  static Lagrangian make(Expr body, LagrangianKind kind, std::map<std::string, double> parameters = {});
};

/// Coefficients of the generalized gauge function (h1/h2) ln|h2 x + h4|.
struct GaugeTriple {
  Expr h1;
  Expr h2;
  Expr h4;
};

struct GaugeFunction {
  Expr body;  // in (x, t)
  std::optional<GaugeTriple> triple;

  /// Throws std::invalid_argument if body contains xdot or xddot.
  static GaugeFunction make(Expr body, std::optional<GaugeTriple> triple = std::nullopt);
};

/// EL[L] = A * xddot + B.
struct EulerLagrange {
  Expr A;
  Expr B;

  Expr residual() const;
};

EulerLagrange euler_lagrange(const Lagrangian& L);

/// E = xdot * dL/dxdot - L.
Expr energy_function(const Lagrangian& L);

/// Pieces of the off-shell identity dE/dt + dL/dt|explicit - xdot * EL[L] = 0.
struct EnergyRate {
  Expr energy_rate;    // dE/dt
  Expr explicit_time;  // partial L / partial t
  Expr el_work;        // xdot * EL[L]

  /// Sum of the three pieces; identically zero.
  Expr residual() const;
};

EnergyRate energy_rate_residual(const Lagrangian& L);

struct NullVerdict {
  bool null = false;
  /// "A" or "B": the component with the larger relative size.
  std::string component;
  double max_relative = 0.0;
  std::optional<expr::Witness> witness;
};

/// Null iff both A and B vanish relative to their own magnitudes.
NullVerdict is_null(const Lagrangian& L, const FuzzConfig& cfg = {});

/// L = dPhi/dt = dPhi/dx * xdot + dPhi/dt, tagged null.
Lagrangian lift_gauge(const GaugeFunction& phi);

/// E = -dPhi/dt.
Expr gauge_energy(const GaugeFunction& phi);

class DegenerateLagrangianError : public std::runtime_error {
 public:
  enum class Reason {
    null,        // A = B = 0: no equation at all
    constraint,  // A = 0, B != 0: an algebraic relation, not dynamics
  };
  DegenerateLagrangianError(Reason reason, const std::string& message)
      : std::runtime_error(message), reason_(reason) {}
  Reason reason() const { return reason_; }

 private:
  Reason reason_;
};

/// xddot = -B/A, simplified. Throws DegenerateLagrangianError when A vanishes.
Expr solve_for_acceleration(const Lagrangian& L, const FuzzConfig& cfg = {});

}  // namespace gaugelab::variational
