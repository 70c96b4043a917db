#pragma once

// Scalar fields from text. Grammar:
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary (('^' | '**') unary)?
//   primary := number | 'x'k | 'pi' | 'e' | 'r2' | '|x|'
//            | fn '(' expr ')' | '(' expr ')'
//   fn      := sin | cos | exp | sqrt | log
//
// Variables are x1..xn. 'r2' is |x|^2 and '|x|' the Euclidean norm.
// Derivatives come from forward-mode propagation of (value, gradient,
// Hessian) triples through the parsed tree, so they are exact up to rounding.

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

#include "pconvex/field.hpp"

namespace pconvex {

struct ExprNode;

class Expression {
public:
  // Throws ParseError with the offending column.
  static Expression parse(std::string_view text, std::size_t n);

  std::size_t dim() const { return n_; }
  const std::string &text() const { return text_; }
  double value(std::span<const double> x) const;
  Jet jet(std::span<const double> x, int order) const;
  ScalarField field() const;

private:
  std::size_t n_ = 0;
  std::string text_;
  std::shared_ptr<const ExprNode> root_;
};

inline ScalarField parse_field(std::string_view text, std::size_t n) {
  return Expression::parse(text, n).field();
}

} // namespace pconvex
