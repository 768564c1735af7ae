// Scenario files and the verify / derive / simulate / boost commands.
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gaugelab/catalog.hpp"
#include "gaugelab/dynamics.hpp"
#include "gaugelab/forces.hpp"
#include "gaugelab/variational.hpp"

namespace gaugelab::cli {

namespace fs = std::filesystem;
using expr::Expr;

enum ExitCode : int { exit_ok = 0, exit_invariant = 1, exit_config = 2, exit_singularity = 3 };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::optional<fs::path> scenario;
  fs::path out = "gaugelab-out";
  std::uint64_t seed = 42;
  bool strict = false;
  /// Overrides the scenario's route.
  std::optional<forces::Route> route;
};

/// What xddot is set to when a scenario is simulated or boosted.
enum class Equation {
  lagrangian,  // solve EL of the Lagrangian (plus -dPhi/dt when a gauge is given)
  force,       // xddot = F from the gauge along the route
  effective,   // xddot = F_eff for the coefficient set
  explicit_,   // xddot = the "acceleration" field
};

struct Scenario {
  std::string name;
  expr::SymbolTable symbols;
  std::map<std::string, double> constants;
  std::optional<catalog::CoefficientSet> coefficients;
  std::optional<variational::Lagrangian> lagrangian;
  std::optional<variational::GaugeFunction> gauge;
  /// Unset means eq9 for (h1, h2, h4) gauges and A otherwise.
  std::optional<forces::Route> route;
  Equation equation = Equation::lagrangian;
  std::optional<Expr> acceleration;
  dynamics::IntegratorConfig integrator;
  double x0 = 1.0;
  double v0 = 1.0;
  std::vector<double> boosts{1.0};
  std::size_t samples = 1000;
};

/// Throws ConfigError on any malformed or inconsistent field.
Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const fs::path& path);

/// The equation of motion a scenario asks for.
struct Resolved {
  Expr acceleration;
  /// Denominators of the Lagrangian the equation came from, if any.
  std::vector<Expr> guards;
  /// Lagrangian used for diagnostics.
  std::optional<variational::Lagrangian> lagrangian;
  std::string description;
};
Resolved resolve_equation(const Scenario& s);

forces::Route effective_route(const Scenario& s);

/// Write via a temporary file in the same directory and rename.
void write_atomic(const fs::path& path, std::string_view content);

/// Each command logs progress to `log`, problems to `err`, and returns an ExitCode.
int cmd_verify(const RunConfig& cfg, std::ostream& log, std::ostream& err);
int cmd_derive(const RunConfig& cfg, std::ostream& log, std::ostream& err);
int cmd_simulate(const RunConfig& cfg, std::ostream& log, std::ostream& err);
int cmd_boost(const RunConfig& cfg, std::ostream& log, std::ostream& err);

}  // namespace gaugelab::cli
