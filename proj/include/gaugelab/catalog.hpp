// Concrete Lagrangians and gauge functions, plus the registry of printed
// closed forms with their independently derived counterparts.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gaugelab/fuzz.hpp"
#include "gaugelab/parser.hpp"
#include "gaugelab/variational.hpp"

namespace gaugelab::catalog {

using expr::Expr;
using expr::FuzzConfig;
using variational::GaugeFunction;
using variational::GaugeTriple;
using variational::Lagrangian;

enum class SetId { inertia_1, inertia_2, custom };

std::string_view set_name(SetId id);

/// Coefficients (g1, g2, g3) of L = 1/(g1 xdot + g2 x + g3).
///
/// Named constants (C1, C2, C3, a_o, v_o) are coefficient nodes with constant
/// definitions, so they print by name and differentiate to 0.
struct CoefficientSet {
  SetId id = SetId::custom;
  Expr g1;
  Expr g2;
  Expr g3;
  std::map<std::string, double> constants;
  /// Constants, f (set 1) and g1..g3 by name, for parsing printed forms.
  expr::SymbolTable symbols;

  /// g1 = C1 f^3, g2 = -C1 a_o f^2, g3 = C1 C2 f^2 with f = a_o t + v_o.
  static CoefficientSet inertia_1(double C1, double C2, double a_o, double v_o);
  /// g1 = C3, g2 = g3 = 0.
  static CoefficientSet inertia_2(double C3);
  static CoefficientSet custom(Expr g1, Expr g2, Expr g3);

  /// Named constant or derived symbol (f, g1, ...). Throws std::out_of_range.
  Expr symbol(std::string_view name) const;
};

/// L = xdot^2 / 2.
Lagrangian standard_inertia();

/// L = 1/(g1 xdot + g2 x + g3). Throws std::invalid_argument when all three
/// coefficients vanish.
Lagrangian nsl_general(const CoefficientSet& coeffs);

struct NullPair {
  GaugeFunction gauge;
  Lagrangian lagrangian;
};

/// Phi = (a1/a2) ln|a2 x + a4|, L = a1 xdot / (a2 x + a4). Requires a2 != 0.
NullPair null_basic(double a1, double a2, double a4);

/// Phi = (h1/h2) ln|h2 x + h4| with h1, h2, h4 functions of t. The inputs are
/// wrapped as coefficients named h1, h2, h4. Throws std::invalid_argument if
/// h2 vanishes identically.
GaugeFunction gauge_general(const Expr& h1, const Expr& h2, const Expr& h4);

/// Symbol table holding h1, h2, h4 of a gauge triple.
expr::SymbolTable gauge_symbols(const GaugeTriple& triple);

// ---------------------------------------------------------------------------
// Printed forms
// ---------------------------------------------------------------------------

enum class FormId { eq1b, eq3b, eq5, eq8a_lhs, eq8b_lhs, eq9, sec5_h4zero, sec5_h4const };

std::span<const FormId> all_form_ids();
std::string_view form_name(FormId id);

class UnknownFormError : public std::invalid_argument {
 public:
  explicit UnknownFormError(std::string_view id)
      : std::invalid_argument("unknown printed-form id '" + std::string(id) + "'") {}
};

FormId parse_form_id(std::string_view name);

/// Verbatim transcription in the expression grammar. Symbols: g1, g2, g3, L
/// (eq1b); h1, h2, h4 and their dot-derivatives (eq3b, eq5, eq9); C1, C2,
/// C3, f, a_o (eq8a, eq8b); c1, c2, c4 (special cases).
std::string_view transcription(FormId id);

/// Parse the transcription against `symbols`. For eq1b, "L" is replaced by
/// the reciprocal of g1*xdot + g2*x + g3 before parsing.
Expr instantiate(FormId id, const expr::SymbolTable& symbols);

/// Coefficient choices used to instantiate forms. Defaults are generic
/// non-constant functions of t and order-1 constants.
struct FormContext {
  CoefficientSet nsl = CoefficientSet::custom(expr::parse("2 + cos(t)"), expr::parse("1 + 0.5*t"),
                                              expr::parse("exp(0.3*t)"));
  Expr h1 = expr::parse("1 + 0.5*t^2");
  Expr h2 = expr::parse("2 + sin(t)");
  Expr h4 = expr::parse("exp(0.5*t)");
  CoefficientSet set1 = CoefficientSet::inertia_1(1.0, 1.0, 1.0, 1.0);
  CoefficientSet set2 = CoefficientSet::inertia_2(1.0);
  double c1 = 1.5;
  double c2 = 2.0;
  double c4 = 0.5;
};

/// Candidate term for the relation search on a mismatch.
struct Hint {
  std::string label;
  Expr term;
};

struct PrintedForm {
  FormId id;
  std::string transcription;
  /// Operation chain that regenerates the canonical counterpart.
  std::string recipe;
  Expr printed;
  Expr canonical;
  std::vector<Hint> hints;
};

PrintedForm printed_form(FormId id, const FormContext& ctx = {});

struct CheckReport {
  std::string id;
  bool match = false;
  double max_residual = 0.0;
  std::optional<expr::Witness> witness;
  std::string note;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  double epsilon = 0.0;
};

CheckReport cross_check(FormId id, const FuzzConfig& cfg = {}, const FormContext& ctx = {});

/// Tries sign flips, constant factors, monomial and denominator-power ratios,
/// and the form's hints; returns a one-line description of the first relation
/// that holds, or a statement that none did.
std::string describe_relation(const PrintedForm& form, const FuzzConfig& cfg);

/// Same search for an arbitrary pair; `lhs_name`/`rhs_name` label the note.
std::string find_relation(const Expr& lhs, const Expr& rhs, std::span<const Hint> hints, const FuzzConfig& cfg,
                          std::string_view lhs_name = "printed", std::string_view rhs_name = "canonical");

nlohmann::json to_json(const expr::Witness& w);
nlohmann::json to_json(const CheckReport& report);

}  // namespace gaugelab::catalog
