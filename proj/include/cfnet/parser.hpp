#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "cfnet/expr.hpp"
#include "cfnet/primitives.hpp"

namespace cfnet {

class ParseError : public std::runtime_error {
 public:
  enum class Kind { Syntax, UnknownPrimitive, VariableOutOfRange };

  ParseError(Kind kind, std::size_t offset, const std::string& message);

  Kind kind() const { return kind_; }
  /// Byte offset into the parsed text where the problem starts.
  std::size_t offset() const { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

/// Parses the vector-field DSL over x1..xn and returns a simplified Expr.
///
///   expr    := term (('+' | '-') term)*          left associative
///   term    := unary ('*' unary)*                 left associative
///   unary   := '-' unary | power
///   power   := atom ('^' INTEGER)?                 no chaining: (a^2)^3
///   atom    := NUMBER | VAR | call | '(' expr ')'
///   call    := NAME ('[' INTEGER ']')? '(' expr ')'
///   VAR     := 'x' DIGITS                          1 <= index <= n
///   NUMBER  := DIGITS ('.' DIGITS?)? ([eE] [+-]? DIGITS)? | '.' DIGITS ...
///
/// Precedence from tightest: '^', unary '-', '*', '+'/'-'. So -x1^2 is
/// -(x1^2). `name[d](arg)` is the d-th derivative of a registered primitive.
Expr parse_expr(std::string_view text, int n,
                const PrimitiveRegistry& registry = PrimitiveRegistry::defaults());

}  // namespace cfnet
