// Forcing functions generated by gauge terms, effective forces, and their
// physical classification.
#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "gaugelab/catalog.hpp"

namespace gaugelab::forces {

using expr::Expr;
using expr::FuzzConfig;
using variational::GaugeFunction;
using variational::GaugeTriple;
using variational::Lagrangian;

enum class Provenance { route_a, route_b, printed_eq9, effective_f1, effective_f2, special_case };

std::string_view provenance_name(Provenance p);

/// Route A: F = -d2Phi/dtdx. Route B: F = dE/dx with E the printed gauge
/// energy. eq9: the printed explicit forcing function.
enum class Route { A, B, eq9 };

std::string_view route_name(Route r);
/// Accepts "A", "B", "eq9". Throws std::invalid_argument.
Route parse_route(std::string_view s);

struct Classification {
  bool zero = false;
  bool time_only = false;
  bool position_dependent = false;
  bool velocity_dependent = false;
  bool dissipative = false;
  /// Share of samples at which varying xdot alone changed F.
  double velocity_fraction = 0.0;
  double position_fraction = 0.0;
  double time_fraction = 0.0;
  std::size_t samples = 0;
};

struct ForceLaw {
  Expr body;  // in (xdot, x, t)
  Provenance provenance = Provenance::route_a;
  std::string source;
  std::optional<Classification> classification;
};

/// Throws std::invalid_argument for route B or eq9 on a gauge without an
/// (h1, h2, h4) triple.
ForceLaw force_from_gauge(const GaugeFunction& phi, Route route);

/// Explicit forcing function for a coefficient triple. When h2 vanishes
/// identically the expression is taken with the h2 denominators cleared,
/// which stays finite.
ForceLaw printed_eq9_force(const GaugeTriple& triple);

/// [h1 h2 xdot + (h1 h2dot - h2 h1dot) x - (h1 h4dot - h4 h1dot)] / (h2 x + h4)^2,
/// equal to the printed expression wherever h2 and h4 are nonzero.
Expr eq9_cleared(const GaugeTriple& triple);

/// L_t = L_ns - dPhi/dt.
Lagrangian total_lagrangian(const Lagrangian& lns, const GaugeFunction& phi);

/// F1 = F C1 (f xdot - a_o x + C2)^3 for set 1; F2 = F C3 xdot^2 / 2 for
/// set 2. Throws std::invalid_argument if `set` does not match coeffs.id.
ForceLaw effective_force(const ForceLaw& F, int set, const catalog::CoefficientSet& coeffs);

/// Numeric comparison of an effective force with -B/A of the matching
/// total Lagrangian.
struct EffectiveCheck {
  bool equal = false;
  double max_residual = 0.0;
  std::optional<expr::Witness> witness;
  std::string note;
  Expr effective;
  Expr acceleration;
};

EffectiveCheck check_effective_force(const GaugeFunction& phi, int set, const catalog::CoefficientSet& coeffs,
                                     const FuzzConfig& cfg = {});

Classification classify(const ForceLaw& F, const FuzzConfig& cfg = {});

nlohmann::json to_json(const Classification& c);
nlohmann::json to_json(const ForceLaw& F);

}  // namespace gaugelab::forces
