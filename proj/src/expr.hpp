#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace abf {

// Arithmetic expressions over named variables: +, -, *, /, ^ (and pow(a,b)),
// exp, sqrt, numeric literals. Immutable AST with symbolic differentiation;
// field components and the exponential family's P(s) are both built on this.
class Expr {
 public:
  Expr();  // constant 0

  static Expr constant(double v);
  static Expr variable(int index);

  // Throws Error(ParseError) with the offending position in the message.
  static Expr parse(const std::string& text, const std::vector<std::string>& variables);

  double eval(std::span<const double> vars) const;
  Expr derivative(int var_index) const;
  bool is_constant(double* value = nullptr) const;
  std::string to_string() const;

  Expr operator+(const Expr&) const;
  Expr operator-(const Expr&) const;
  Expr operator*(const Expr&) const;
  Expr operator/(const Expr&) const;

  struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

}  // namespace abf
