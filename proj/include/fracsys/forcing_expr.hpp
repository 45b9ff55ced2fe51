#pragma once

#include <memory>
#include <string>

namespace fracsys {

// Scalar expression in t:
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' unary)?
//   atom   := number | 't' | 'pi' | ('exp' | 'sin' | 'cos') '(' expr ')' | '(' expr ')'
// Exponents must be constant. No names other than the above are accepted.
class ForcingExpr {
 public:
  struct Node;

  ForcingExpr();
  static ForcingExpr parse(const std::string& text);

  double operator()(double t) const;
  const std::string& source() const { return source_; }
  bool is_zero() const;

 private:
  std::string source_;
  std::shared_ptr<const Node> root_;
};

}  // namespace fracsys
