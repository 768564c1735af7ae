#include "gaugelab/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gaugelab::expr {

Expr coefficient_derivative(const Expr& coefficient) {
  Expr d = simplify(partial(coefficient.definition(), Var::t));
  if (d.is_constant()) return d;
  return Expr::coefficient(coefficient.name() + "dot", d);
}

Expr partial(const Expr& e, Var v) {
  switch (e.kind()) {
    case Kind::constant:
      return Expr();
    case Kind::variable:
      return Expr::constant(e.var() == v ? 1.0 : 0.0);
    case Kind::coefficient:
      return v == Var::t ? coefficient_derivative(e) : Expr();
    case Kind::sum: {
      std::vector<Expr> terms;
      for (const auto& c : e.children()) terms.push_back(partial(c, v));
      return sum(std::move(terms));
    }
    case Kind::product: {
      const auto kids = e.children();
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < kids.size(); ++i) {
        Expr d = partial(kids[i], v);
        if (d.is_zero()) continue;
        std::vector<Expr> factors;
        for (std::size_t j = 0; j < kids.size(); ++j) factors.push_back(j == i ? d : kids[j]);
        terms.push_back(product(std::move(factors)));
      }
      return sum(std::move(terms));
    }
    case Kind::quotient: {
      const Expr& n = e.child(0);
      const Expr& d = e.child(1);
      Expr dn = partial(n, v);
      Expr dd = partial(d, v);
      if (dd.is_zero()) return quotient(dn, d);
      return quotient(dn * d - n * dd, pow(d, 2));
    }
    case Kind::power: {
      Expr du = partial(e.child(), v);
      if (du.is_zero()) return Expr();
      const Rational r = e.exponent();
      return product({Expr::constant(r.to_double()), pow(e.child(), r + Rational{-1, 1}), du});
    }
    case Kind::log_abs:
      return quotient(partial(e.child(), v), e.child());
    case Kind::exp:
      return product({e, partial(e.child(), v)});
    case Kind::sin:
      return product({cos(e.child()), partial(e.child(), v)});
    case Kind::cos:
      return neg(product({sin(e.child()), partial(e.child(), v)}));
    case Kind::negation:
      return neg(partial(e.child(), v));
  }
  return Expr();
}

Expr total_time_derivative(const Expr& e) {
  if (depends_on(e, Var::xddot)) {
    throw std::invalid_argument("total time derivative of an expression containing xddot");
  }
  return simplify(partial(e, Var::t) + xdot() * partial(e, Var::x) + xddot() * partial(e, Var::xdot));
}

// ---------------------------------------------------------------------------
// simplify
// ---------------------------------------------------------------------------

namespace {

class Simplifier {
 public:
  Expr run(const Expr& e) {
    switch (e.kind()) {
      case Kind::constant:
      case Kind::variable:
      case Kind::coefficient:
        return e;
      case Kind::sum: {
        std::vector<Expr> terms;
        for (const auto& c : e.children()) terms.push_back(run(c));
        return collect_terms(sum(std::move(terms)));
      }
      case Kind::product: {
        Multiplicative m;
        for (const auto& c : e.children()) m.add(run(c), Rational{1, 1});
        return finish(m);
      }
      case Kind::quotient: {
        Multiplicative m;
        m.add(run(e.child(0)), Rational{1, 1});
        m.add(run(e.child(1)), Rational{-1, 1});
        return finish(m);
      }
      case Kind::power: {
        Expr base = run(e.child());
        const Rational r = e.exponent();
        if (r.is_integer() && (base.kind() == Kind::product || base.kind() == Kind::quotient ||
                               base.kind() == Kind::negation)) {
          Multiplicative m;
          m.add(base, r);
          return finish(m);
        }
        return pow(base, r);
      }
      case Kind::negation: {
        Expr inner = run(e.child());
        if (inner.kind() == Kind::sum) {
          std::vector<Expr> terms;
          for (const auto& c : inner.children()) terms.push_back(neg(c));
          return collect_terms(sum(std::move(terms)));
        }
        return neg(inner);
      }
      case Kind::log_abs: return log_abs(run(e.child()));
      case Kind::exp: return exp(run(e.child()));
      case Kind::sin: return sin(run(e.child()));
      case Kind::cos: return cos(run(e.child()));
    }
    return e;
  }

  std::vector<Expr> assumptions;

 private:
  // Product of base^exponent factors with a numeric coefficient.
  struct Multiplicative {
    double coefficient = 1.0;
    struct Factor {
      Expr base;
      Rational exponent;
      bool had_positive = false;
      bool had_negative = false;
    };
    std::vector<Factor> factors;

    void add(const Expr& e, Rational r) {
      switch (e.kind()) {
        case Kind::constant:
          if (r.is_integer() || e.value() > 0.0) {
            coefficient *= std::pow(e.value(), r.to_double());
            return;
          }
          break;
        case Kind::negation:
          if (r.is_integer()) {
            if (r.num % 2 != 0) coefficient = -coefficient;
            add(e.child(), r);
            return;
          }
          break;
        case Kind::product:
          if (r.is_integer()) {
            for (const auto& c : e.children()) add(c, r);
            return;
          }
          break;
        case Kind::quotient:
          if (r.is_integer()) {
            add(e.child(0), r);
            add(e.child(1), r * Rational{-1, 1});
            return;
          }
          break;
        case Kind::power:
          if (r.is_integer() && e.exponent().is_integer()) {
            add(e.child(), e.exponent() * r);
            return;
          }
          break;
        default:
          break;
      }
      const bool integral = r.is_integer();
      for (auto& f : factors) {
        if (f.exponent.is_integer() == integral && (integral || f.exponent == r) && f.base == e) {
          f.exponent = f.exponent + r;
          (r.num > 0 ? f.had_positive : f.had_negative) = true;
          return;
        }
      }
      Factor f{e, r};
      (r.num > 0 ? f.had_positive : f.had_negative) = true;
      factors.push_back(std::move(f));
    }
  };

  Expr finish(Multiplicative& m) {
    if (m.coefficient == 0.0) return Expr();
    std::sort(m.factors.begin(), m.factors.end(),
              [](const auto& a, const auto& b) { return compare(a.base, b.base) < 0; });
    std::vector<Expr> num{Expr::constant(m.coefficient)};
    std::vector<Expr> den;
    for (const auto& f : m.factors) {
      if (f.had_positive && f.had_negative) note_assumption(f.base);
      if (f.exponent.num > 0) {
        num.push_back(pow(f.base, f.exponent));
      } else if (f.exponent.num < 0) {
        den.push_back(pow(f.base, f.exponent * Rational{-1, 1}));
      }
    }
    Expr n = product(std::move(num));
    if (den.empty()) return n;
    Expr d = product(std::move(den));
    // Keep the sign on the numerator.
    if (d.kind() == Kind::negation) {
      d = d.child();
      n = neg(n);
    }
    return quotient(n, d);
  }

  // Split a term into numeric coefficient and structural key.
  static std::pair<double, Expr> split(const Expr& e) {
    switch (e.kind()) {
      case Kind::constant:
        return {e.value(), Expr::constant(1.0)};
      case Kind::negation: {
        auto [c, k] = split(e.child());
        return {-c, k};
      }
      case Kind::product:
        if (e.child().is_constant()) {
          std::vector<Expr> rest(e.children().begin() + 1, e.children().end());
          return {e.child().value(), product(std::move(rest))};
        }
        break;
      case Kind::quotient: {
        auto [c, k] = split(e.child(0));
        if (c != 1.0) return {c, quotient(k, e.child(1))};
        break;
      }
      default:
        break;
    }
    return {1.0, e};
  }

  Expr collect_terms(const Expr& e) {
    if (e.kind() != Kind::sum) return e;
    std::vector<std::pair<Expr, double>> groups;
    for (const auto& term : e.children()) {
      auto [c, key] = split(term);
      auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == key; });
      if (it == groups.end()) {
        groups.emplace_back(key, c);
      } else {
        it->second += c;
      }
    }
    std::stable_sort(groups.begin(), groups.end(),
                     [](const auto& a, const auto& b) { return compare(a.first, b.first) < 0; });
    std::vector<Expr> terms;
    for (const auto& [key, c] : groups) {
      if (c == 0.0) continue;
      terms.push_back(key.is_one() ? Expr::constant(c) : scale(key, c));
    }
    return sum(std::move(terms));
  }

  static Expr scale(const Expr& key, double c) {
    if (c == 1.0) return key;
    if (key.kind() == Kind::quotient) return quotient(product({Expr::constant(c), key.child(0)}), key.child(1));
    return product({Expr::constant(c), key});
  }

  void note_assumption(const Expr& base) {
    if (std::none_of(assumptions.begin(), assumptions.end(), [&](const Expr& a) { return a == base; })) {
      assumptions.push_back(base);
    }
  }
};

}  // namespace

SimplifyResult simplify_with_assumptions(const Expr& e) {
  Simplifier s;
  Expr current = s.run(e);
  // A second pass picks up cancellations exposed by the first.
  for (int pass = 0; pass < 2; ++pass) {
    Expr next = s.run(current);
    if (next == current) break;
    current = std::move(next);
  }
  return {current, std::move(s.assumptions)};
}

Expr simplify(const Expr& e) { return simplify_with_assumptions(e).expr; }

}  // namespace gaugelab::expr
