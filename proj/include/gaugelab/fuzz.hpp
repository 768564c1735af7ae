// Numeric equivalence oracle: deterministic guarded random sampling.
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "gaugelab/evaluate.hpp"
#include "gaugelab/expr.hpp"

namespace gaugelab::expr {

/// Values are drawn uniformly from [lo, hi] with (-gap, gap) removed.
struct Interval {
  double lo = -2.0;
  double hi = 2.0;
  double gap = 0.1;

  double map(double unit) const;
};

struct FuzzConfig {
  std::size_t samples = 1000;
  std::array<Interval, 4> box{};  // indexed by Var
  /// Samples where any registered singular subexpression is smaller than
  /// this in magnitude are redrawn.
  double delta = 0.05;
  double epsilon = 1e-8;
  std::uint64_t seed = 42;
  std::size_t max_redraws = 64;

  void validate() const;
  FuzzConfig with_epsilon(double eps) const {
    FuzzConfig c = *this;
    c.epsilon = eps;
    return c;
  }
  FuzzConfig with_samples(std::size_t n) const {
    FuzzConfig c = *this;
    c.samples = n;
    return c;
  }
};

/// Every drawn sample hit the denominator guard.
class IndeterminateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform [0,1) value for (seed, sample index, attempt, stream). Pure, so
/// samples can be generated in any order or in parallel.
double unit_draw(std::uint64_t seed, std::uint64_t index, std::uint64_t attempt, std::uint64_t stream);

/// Draw the guarded sample with the given index. Returns nullopt when every
/// redraw hit the guard. `accept` may throw SingularPointError to reject.
std::optional<Binding> draw_sample(const FuzzConfig& cfg, std::size_t index, std::span<const Expr> guards,
                                   const std::function<void(const Binding&)>& accept = {});

/// Call `visit` on cfg.samples guarded samples in index order. Returns the
/// number visited; throws IndeterminateError if none could be drawn.
std::size_t for_each_sample(const FuzzConfig& cfg, std::span<const Expr> guards,
                            const std::function<void(const Binding&)>& visit);

/// |a - b| scaled by the largest magnitude involved in either evaluation.
double relative_residual(const Evaluated& a, const Evaluated& b);

struct Witness {
  Binding binding;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
};

struct EquivalenceVerdict {
  bool equivalent = false;
  double max_residual = 0.0;
  std::size_t samples = 0;
  /// Sample with the largest residual; always set when !equivalent.
  std::optional<Witness> witness;
};

EquivalenceVerdict equivalent(const Expr& lhs, const Expr& rhs, const FuzzConfig& cfg = {});

struct VanishingVerdict {
  bool vanishes = false;
  /// Largest |value| / magnitude over the samples.
  double max_relative = 0.0;
  std::size_t samples = 0;
  /// Sample with the largest relative value.
  std::optional<Witness> witness;
};

/// Whether `e` is identically zero on the box, judged relative to the
/// magnitudes that cancel inside it. Structural zero short-circuits.
VanishingVerdict vanishes(const Expr& e, const FuzzConfig& cfg = {}, std::span<const Expr> extra_guards = {});

}  // namespace gaugelab::expr
