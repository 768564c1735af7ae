// Galilean boosts x = x' + V0 t', t = t', and the invariance checks built on them.
#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gaugelab/expr.hpp"
#include "gaugelab/fuzz.hpp"
#include "gaugelab/variational.hpp"

namespace gaugelab::galilean {

using expr::Expr;
using expr::FuzzConfig;

enum class Direction { to_primed, to_unprimed };

struct BoostParams {
  double V0 = 0.0;
  Direction direction = Direction::to_primed;

  /// Throws std::invalid_argument for non-finite V0.
  void validate() const;
  BoostParams inverse() const;
};

/// to_primed: x -> x + V0 t, xdot -> xdot + V0 (xddot and t unchanged), so the
/// result is `e` written in the moving frame's variables. to_unprimed undoes it.
/// Coefficients are functions of t alone and pass through untouched.
Expr boost(const Expr& e, const BoostParams& p);

/// x -> x + b.
Expr translate(const Expr& e, double b);

/// A Lagrangian family with named numeric parameters that form matching may
/// relabel.
struct Template {
  std::string name;
  std::map<std::string, double> values;
  std::function<Expr(const std::map<std::string, double>&)> build;
  /// Freed first; the rest stay pinned unless that fit fails.
  std::vector<std::string> first_stage;
  /// Named conditions on (original, matched, V0); each returns lhs and rhs
  /// that must agree.
  struct Condition {
    std::string label;
    std::string statement;
    std::function<std::pair<double, double>(const std::map<std::string, double>&,
                                            const std::map<std::string, double>&, double)>
        sides;
  };
  std::vector<Condition> conditions;

  Expr instantiate() const { return build(values); }
};

/// 1 / (C1 f^2 (f xdot - a_o x + C2)), f = a_o t + v_o.
Template inertia_1_template(double C1, double C2, double a_o, double v_o);
/// xdot^2 / 2, no parameters.
Template standard_template();
/// Recognizes the two families above from a Lagrangian's body and parameters.
std::optional<Template> template_for(const variational::Lagrangian& L);

struct ConditionResult {
  std::string label;
  std::string statement;
  bool holds = false;
  double lhs = 0.0;
  double rhs = 0.0;
  std::optional<expr::Witness> witness;
};

struct InvarianceReport {
  std::string template_name;
  double V0 = 0.0;
  /// "match" first, then the template's own conditions.
  std::vector<ConditionResult> conditions;
  bool holds = false;
  /// name -> (original, matched).
  std::map<std::string, std::pair<double, double>> parameter_map;
  double max_residual = 0.0;
  std::string note;
};

/// Look for parameters p' with boost(template(p')) == template(p). A Lagrangian
/// with no recognizable template yields a failing report, not an exception.
InvarianceReport check_form_invariance(const Template& tpl, const BoostParams& p,
                                       const FuzzConfig& cfg = FuzzConfig{}.with_samples(200).with_epsilon(1e-10));
InvarianceReport check_form_invariance(const variational::Lagrangian& L, const BoostParams& p,
                                       const FuzzConfig& cfg = FuzzConfig{}.with_samples(200).with_epsilon(1e-10));

struct EomVerdict {
  bool invariant = false;
  double V0 = 0.0;
  double max_residual = 0.0;
  std::size_t samples = 0;
  /// Point (in primed variables) where the two frames disagree most.
  std::optional<expr::Witness> witness;
};

/// xddot = accel is invariant iff boost(accel) == accel on the fuzz box.
EomVerdict check_eom_invariance(const Expr& accel, const BoostParams& p, const FuzzConfig& cfg = {});

nlohmann::json to_json(const InvarianceReport& r);
nlohmann::json to_json(const EomVerdict& v);

}  // namespace gaugelab::galilean
