#include "gaugelab/fuzz.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace gaugelab::expr {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

double Interval::map(double unit) const {
  // Length of the two pieces [lo, -gap] and [gap, hi] (either may be empty).
  const double left = std::max(0.0, std::min(hi, -gap) - lo);
  const double right = std::max(0.0, hi - std::max(lo, gap));
  const double total = left + right;
  if (total <= 0.0) return lo;
  const double s = unit * total;
  if (s < left) return lo + s;
  return std::max(lo, gap) + (s - left);
}

void FuzzConfig::validate() const {
  if (samples < 1) throw std::invalid_argument("fuzz sample count must be positive");
  if (!(delta > 0.0)) throw std::invalid_argument("fuzz denominator guard must be positive");
  if (!(epsilon > 0.0)) throw std::invalid_argument("fuzz tolerance must be positive");
  for (const auto& iv : box) {
    if (!(iv.hi > iv.lo)) throw std::invalid_argument("fuzz sampling interval is empty");
  }
}

double unit_draw(std::uint64_t seed, std::uint64_t index, std::uint64_t attempt, std::uint64_t stream) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ index);
  h = splitmix64(h ^ (attempt * 0x632be59bd9b4e019ULL));
  h = splitmix64(h ^ (stream * 0x8cb92ba72f3d8dd7ULL));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

std::optional<Binding> draw_sample(const FuzzConfig& cfg, std::size_t index, std::span<const Expr> guards,
                                   const std::function<void(const Binding&)>& accept) {
  for (std::size_t attempt = 0; attempt < cfg.max_redraws; ++attempt) {
    Binding b;
    for (Var v : kAllVars) {
      const auto k = static_cast<std::size_t>(v);
      b.set(v, cfg.box[k].map(unit_draw(cfg.seed, index, attempt, k)));
    }
    try {
      const bool guarded = std::all_of(guards.begin(), guards.end(), [&](const Expr& g) {
        return std::fabs(evaluate(g, b)) >= cfg.delta;
      });
      if (!guarded) continue;
      if (accept) accept(b);
      return b;
    } catch (const SingularPointError&) {
      continue;
    }
  }
  return std::nullopt;
}

std::size_t for_each_sample(const FuzzConfig& cfg, std::span<const Expr> guards,
                            const std::function<void(const Binding&)>& visit) {
  cfg.validate();
  std::size_t visited = 0;
  for (std::size_t i = 0; i < cfg.samples; ++i) {
    if (draw_sample(cfg, i, guards, visit)) ++visited;
  }
  if (visited == 0) throw IndeterminateError("every sample hit the denominator guard");
  return visited;
}

double relative_residual(const Evaluated& a, const Evaluated& b) {
  const double scale =
      std::max({std::fabs(a.value), std::fabs(b.value), a.magnitude, b.magnitude});
  if (scale == 0.0) return 0.0;
  return std::fabs(a.value - b.value) / scale;
}

EquivalenceVerdict equivalent(const Expr& lhs, const Expr& rhs, const FuzzConfig& cfg) {
  std::set<Expr, ExprLess> guard_set;
  for (const auto& g : singular_subexpressions(lhs)) guard_set.insert(g);
  for (const auto& g : singular_subexpressions(rhs)) guard_set.insert(g);
  const std::vector<Expr> guards(guard_set.begin(), guard_set.end());

  EquivalenceVerdict verdict;
  verdict.equivalent = true;
  verdict.samples = for_each_sample(cfg, guards, [&](const Binding& b) {
    const Evaluated a = evaluate_with_magnitude(lhs, b);
    const Evaluated c = evaluate_with_magnitude(rhs, b);
    const double r = relative_residual(a, c);
    if (!verdict.witness || r > verdict.max_residual) {
      verdict.max_residual = r;
      verdict.witness = Witness{b, a.value, c.value, r};
    }
  });
  verdict.equivalent = verdict.max_residual < cfg.epsilon;
  return verdict;
}

VanishingVerdict vanishes(const Expr& e, const FuzzConfig& cfg, std::span<const Expr> extra_guards) {
  VanishingVerdict verdict;
  if (e.is_zero()) {
    cfg.validate();
    verdict.vanishes = true;
    verdict.samples = cfg.samples;
    return verdict;
  }
  std::set<Expr, ExprLess> guard_set;
  for (const auto& g : singular_subexpressions(e)) guard_set.insert(g);
  for (const auto& g : extra_guards) guard_set.insert(g);
  const std::vector<Expr> guards(guard_set.begin(), guard_set.end());
  verdict.samples = for_each_sample(cfg, guards, [&](const Binding& b) {
    const Evaluated v = evaluate_with_magnitude(e, b);
    const double r = v.magnitude == 0.0 ? 0.0 : std::fabs(v.value) / v.magnitude;
    if (!verdict.witness || r > verdict.max_relative) {
      verdict.max_relative = r;
      verdict.witness = Witness{b, v.value, 0.0, r};
    }
  });
  verdict.vanishes = verdict.max_relative < cfg.epsilon;
  return verdict;
}

}  // namespace gaugelab::expr
