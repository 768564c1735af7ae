#include "gaugelab/parser.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <system_error>

#include "gaugelab/calculus.hpp"

namespace gaugelab::expr {

Expr SymbolTable::define(const std::string& name, const Expr& definition) {
  Expr coef = Expr::coefficient(name, definition);
  entries_.insert_or_assign(name, coef);
  return coef;
}

Expr SymbolTable::define(const std::string& name, std::string_view definition) {
  return define(name, parse(definition, *this));
}

std::optional<Expr> SymbolTable::lookup(std::string_view name) const {
  if (auto it = entries_.find(name); it != entries_.end()) return it->second;
  constexpr std::string_view kDot = "dot";
  if (name.size() > kDot.size() && name.substr(name.size() - kDot.size()) == kDot) {
    auto base = lookup(name.substr(0, name.size() - kDot.size()));
    if (!base) return std::nullopt;
    if (base->kind() != Kind::coefficient) return Expr::constant(0.0);
    return coefficient_derivative(*base);
  }
  return std::nullopt;
}

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, end);
}

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

namespace {

enum Prec : int { kSum = 1, kUnary = 2, kMul = 3, kPow = 4, kAtom = 5 };

bool leading_negative_product(const Expr& e) {
  return e.kind() == Kind::product && e.child().is_constant() && e.child().value() < 0.0;
}

bool negative_like(const Expr& e) {
  return e.kind() == Kind::negation || (e.is_constant() && e.value() < 0.0) ||
         leading_negative_product(e);
}

/// The expression whose negation `e` is (only for negative_like nodes).
Expr negated(const Expr& e) {
  if (e.kind() == Kind::negation) return e.child();
  return neg(e);
}

int precedence(const Expr& e) {
  switch (e.kind()) {
    case Kind::sum: return kSum;
    case Kind::negation: return kUnary;
    case Kind::constant: return e.value() < 0.0 ? kUnary : kAtom;
    case Kind::product: return leading_negative_product(e) ? kUnary : kMul;
    case Kind::quotient: return kMul;
    case Kind::power: return kPow;
    default: return kAtom;
  }
}

void print(const Expr& e, int context, std::string& out);

void print_body(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case Kind::constant:
      if (e.value() < 0.0) {
        out += '-';
        out += format_number(-e.value());
      } else {
        out += format_number(e.value());
      }
      return;
    case Kind::variable:
      out += var_name(e.var());
      return;
    case Kind::coefficient:
      out += e.name();
      return;
    case Kind::sum: {
      const auto kids = e.children();
      print(kids[0], kUnary, out);
      for (std::size_t i = 1; i < kids.size(); ++i) {
        if (negative_like(kids[i])) {
          out += " - ";
          print(negated(kids[i]), kMul, out);
        } else {
          out += " + ";
          print(kids[i], kMul, out);
        }
      }
      return;
    }
    case Kind::negation:
      out += '-';
      print(e.child(), kMul, out);
      return;
    case Kind::product: {
      if (leading_negative_product(e)) {
        out += '-';
        print(negated(e), kMul, out);
        return;
      }
      bool first = true;
      for (const auto& c : e.children()) {
        if (!first) out += '*';
        first = false;
        print(c, kPow, out);
      }
      return;
    }
    case Kind::quotient:
      print(e.child(0), kMul, out);
      out += '/';
      print(e.child(1), kPow, out);
      return;
    case Kind::power: {
      print(e.child(), kAtom, out);
      out += '^';
      const Rational r = e.exponent();
      if (r.is_integer() && r.num >= 0) {
        out += std::to_string(r.num);
      } else {
        out += '(';
        out += std::to_string(r.num);
        if (!r.is_integer()) {
          out += '/';
          out += std::to_string(r.den);
        }
        out += ')';
      }
      return;
    }
    case Kind::log_abs:
      out += "ln(abs(";
      print(e.child(), 0, out);
      out += "))";
      return;
    case Kind::exp:
    case Kind::sin:
    case Kind::cos:
      out += e.kind() == Kind::exp ? "exp(" : e.kind() == Kind::sin ? "sin(" : "cos(";
      print(e.child(), 0, out);
      out += ')';
      return;
  }
}

void print(const Expr& e, int context, std::string& out) {
  const bool wrap = precedence(e) < context;
  if (wrap) out += '(';
  print_body(e, out);
  if (wrap) out += ')';
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

class Parser {
 public:
  Parser(std::string_view text, const SymbolTable& symbols) : text_(text), symbols_(symbols) {}

  Expr run() {
    Expr e = expression();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  Expr expression() {
    const bool leading_minus = accept('-');
    Expr first = term();
    std::vector<Expr> terms{leading_minus ? neg(first) : first};
    for (;;) {
      if (accept('+')) {
        terms.push_back(term());
      } else if (accept('-')) {
        terms.push_back(neg(term()));
      } else {
        break;
      }
    }
    return terms.size() == 1 ? terms.front() : sum(std::move(terms));
  }

  Expr term() {
    Expr acc = factor();
    for (;;) {
      if (accept('*')) {
        acc = product({acc, factor()});
      } else if (accept('/')) {
        const std::size_t at = pos_;
        Expr den = factor();
        if (den.is_zero()) throw ParseError("division by constant zero", at);
        acc = quotient(acc, den);
      } else {
        return acc;
      }
    }
  }

  Expr factor() {
    Expr base = primary();
    if (!accept('^')) return base;
    return pow(base, exponent());
  }

  Rational exponent() {
    if (accept('(')) {
      const bool negative = accept('-');
      std::int64_t num = integer();
      std::int64_t den = 1;
      if (accept('/')) den = integer();
      expect(')');
      if (den == 0) fail("zero exponent denominator");
      return Rational::make(negative ? -num : num, den);
    }
    return Rational::make(integer(), 1);
  }

  std::int64_t integer() {
    skip_ws();
    std::int64_t value = 0;
    auto [end, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
    if (ec != std::errc()) fail("expected integer exponent");
    pos_ = static_cast<std::size_t>(end - text_.data());
    return value;
  }

  Expr primary() {
    const char c = peek();
    if (c == '(') {
      ++pos_;
      Expr inner = expression();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    if (c == '\0') fail("unexpected end of input");
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Expr number() {
    const std::size_t start = pos_;
    std::size_t end = pos_;
    auto digits = [&] {
      while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
    };
    digits();
    if (end < text_.size() && text_[end] == '.') {
      ++end;
      digits();
    }
    if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
      std::size_t probe = end + 1;
      if (probe < text_.size() && (text_[probe] == '+' || text_[probe] == '-')) ++probe;
      if (probe < text_.size() && std::isdigit(static_cast<unsigned char>(text_[probe]))) {
        end = probe;
        digits();
      }
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + end, value);
    if (ec != std::errc() || ptr != text_.data() + end) fail("malformed number");
    pos_ = end;
    return Expr::constant(value);
  }

  std::string_view name() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    return text_.substr(start, pos_ - start);
  }

  Expr call_argument() {
    expect('(');
    Expr arg = expression();
    expect(')');
    return arg;
  }

  Expr identifier() {
    const std::size_t start = pos_;
    const std::string_view id = name();
    if (id == "t") return t();
    if (id == "x") return x();
    if (id == "xdot") return xdot();
    if (id == "xddot") return xddot();
    if (id == "ln") {
      expect('(');
      skip_ws();
      const std::size_t at = pos_;
      if (name() != "abs") throw ParseError("ln must be applied as ln(abs(...))", at);
      Expr arg = call_argument();
      expect(')');
      if (arg.is_zero()) throw ParseError("logarithm of constant zero", at);
      return log_abs(arg);
    }
    if (id == "exp") return exp(call_argument());
    if (id == "sin") return sin(call_argument());
    if (id == "cos") return cos(call_argument());
    if (auto coef = symbols_.lookup(id)) return *coef;
    throw UnknownIdentifierError(std::string(id), start);
  }

  std::string_view text_;
  const SymbolTable& symbols_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print(e, 0, out);
  return out;
}

Expr parse(std::string_view text, const SymbolTable& symbols) { return Parser(text, symbols).run(); }

}  // namespace gaugelab::expr
