// Infix grammar for expressions:
//
//   expr    := ['-'] term { ('+' | '-') term }
//   term    := factor { ('*' | '/') factor }
//   factor  := primary [ '^' exponent ]
//   exponent:= integer | '(' ['-'] integer [ '/' integer ] ')'
//   primary := number | identifier | call | '(' expr ')'
//   call    := 'ln' '(' 'abs' '(' expr ')' ')' | ('exp'|'sin'|'cos') '(' expr ')'
//
// Identifiers t, x, xdot, xddot are the variables; anything else must be a
// coefficient known to the SymbolTable. A name "<c>dot" (or "<c>dotdot")
// resolves to the time derivative of coefficient <c>.
#pragma once

#include <map>
#include <ostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "gaugelab/expr.hpp"

namespace gaugelab::expr {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : std::runtime_error(message + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class UnknownIdentifierError : public ParseError {
 public:
  UnknownIdentifierError(const std::string& name, std::size_t position)
      : ParseError("unknown identifier '" + name + "'", position), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// Named coefficient functions of time available to the parser.
class SymbolTable {
 public:
  /// Define `name` with `definition` (an expression in t). Returns the
  /// coefficient node. Redefinition replaces the previous entry.
  Expr define(const std::string& name, const Expr& definition);
  /// Parse `definition` against the current table, then define it.
  Expr define(const std::string& name, std::string_view definition);

  /// Coefficient node for `name`, resolving "<c>dot" suffixes to derivatives.
  std::optional<Expr> lookup(std::string_view name) const;
  bool contains(std::string_view name) const { return entries_.count(std::string(name)) != 0; }
  const std::map<std::string, Expr, std::less<>>& entries() const { return entries_; }

 private:
  std::map<std::string, Expr, std::less<>> entries_;
};

Expr parse(std::string_view text, const SymbolTable& symbols = {});

/// Deterministic pretty-printer emitting the grammar above;
/// parse(to_string(e), symbols) is structurally equal to e whenever every
/// coefficient in e comes from `symbols`.
std::string to_string(const Expr& e);

inline std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << to_string(e); }

/// Shortest decimal that reads back to the same double.
std::string format_number(double v);

}  // namespace gaugelab::expr
