// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace ergocheck::cli {

struct ExprNode;

/// Compiled scalar expression in the variables x and u.
///
/// Grammar (precedence low to high):
///   cmp     := sum (('<' | '<=' | '>' | '>=') sum)?
///   sum     := product (('+' | '-') product)*
///   product := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := atom ('^' unary)?
///   atom    := number | 'x' | 'u' | '(' cmp ')' | '|' cmp '|' | call
///   call    := name '(' cmp (',' cmp)* ')'
/// Functions: abs exp log sqrt sgn (one argument), min max (two),
/// if(c, a, b) which yields a when c != 0 and b otherwise. Comparisons yield
/// 1 or 0.
class Expression {
 public:
  /// Throws Error(ParseError) with the offending column on malformed input.
  static Expression parse(std::string_view text);

  double operator()(double x, double u = 0.0) const;

  const std::string& source() const noexcept { return source_; }
  bool uses_u() const noexcept { return uses_u_; }

 private:
  Expression(std::string source, std::shared_ptr<const ExprNode> root, bool uses_u)
      : source_(std::move(source)), root_(std::move(root)), uses_u_(uses_u) {}

  std::string source_;
  std::shared_ptr<const ExprNode> root_;
  bool uses_u_;
};

}  // namespace ergocheck::cli
