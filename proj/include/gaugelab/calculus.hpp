#pragma once

#include <vector>

#include "gaugelab/expr.hpp"

namespace gaugelab::expr {

/// d/dt of a coefficient function: a constant when the derivative of the
/// definition folds to one, otherwise a coefficient named "<name>dot".
Expr coefficient_derivative(const Expr& coefficient);

/// Partial derivative. With respect to t, coefficient functions are
/// differentiated through their definitions.
Expr partial(const Expr& e, Var v);

/// d/dt = d/dt|explicit + xdot d/dx + xddot d/dxdot. Rejects input that
/// already contains xddot.
Expr total_time_derivative(const Expr& e);

struct SimplifyResult {
  Expr expr;
  /// Factors cancelled as u/u -> 1; the result is only valid where each is
  /// nonzero.
  std::vector<Expr> nonzero_assumptions;
};

/// Best-effort algebraic cleanup: constant folding, flattening, like-term
/// collection, and cancellation of identical factors in products/quotients.
SimplifyResult simplify_with_assumptions(const Expr& e);
Expr simplify(const Expr& e);

}  // namespace gaugelab::expr
