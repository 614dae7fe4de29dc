#include "expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

#include "error.hpp"

namespace abf {

enum class Op { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Exp, Sqrt };

struct Expr::Node {
  Op op = Op::Const;
  double value = 0.0;  // Const
  int var = -1;        // Var
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make_const(double v) {
  auto n = std::make_shared<Expr::Node>();
  n->op = Op::Const;
  n->value = v;
  return n;
}

NodePtr make_var(int idx) {
  auto n = std::make_shared<Expr::Node>();
  n->op = Op::Var;
  n->var = idx;
  return n;
}

NodePtr make_node(Op op, NodePtr a, NodePtr b = nullptr) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

bool const_value(const NodePtr& n, double* v) {
  if (n->op != Op::Const) return false;
  if (v) *v = n->value;
  return true;
}

// Light constant folding keeps derivative trees small.
NodePtr simplify(Op op, NodePtr a, NodePtr b = nullptr) {
  double ca = 0, cb = 0;
  bool fa = const_value(a, &ca);
  bool fb = b && const_value(b, &cb);
  switch (op) {
    case Op::Add:
      if (fa && fb) return make_const(ca + cb);
      if (fa && ca == 0.0) return b;
      if (fb && cb == 0.0) return a;
      break;
    case Op::Sub:
      if (fa && fb) return make_const(ca - cb);
      if (fb && cb == 0.0) return a;
      if (fa && ca == 0.0) return make_node(Op::Neg, b);
      break;
    case Op::Mul:
      if (fa && fb) return make_const(ca * cb);
      if ((fa && ca == 0.0) || (fb && cb == 0.0)) return make_const(0.0);
      if (fa && ca == 1.0) return b;
      if (fb && cb == 1.0) return a;
      break;
    case Op::Div:
      if (fa && fb && cb != 0.0) return make_const(ca / cb);
      if (fa && ca == 0.0) return make_const(0.0);
      if (fb && cb == 1.0) return a;
      break;
    case Op::Neg:
      if (fa) return make_const(-ca);
      break;
    case Op::Pow:
      if (fa && fb) return make_const(std::pow(ca, cb));
      if (fb && cb == 1.0) return a;
      if (fb && cb == 0.0) return make_const(1.0);
      break;
    case Op::Exp:
      if (fa) return make_const(std::exp(ca));
      break;
    case Op::Sqrt:
      if (fa) return make_const(std::sqrt(ca));
      break;
    default:
      break;
  }
  return make_node(op, std::move(a), std::move(b));
}

double eval_node(const Expr::Node* n, std::span<const double> vars) {
  switch (n->op) {
    case Op::Const: return n->value;
    case Op::Var:
      if (n->var < 0 || static_cast<size_t>(n->var) >= vars.size())
        fail(Code::Internal, "expression variable index out of range");
      return vars[n->var];
    case Op::Add: return eval_node(n->a.get(), vars) + eval_node(n->b.get(), vars);
    case Op::Sub: return eval_node(n->a.get(), vars) - eval_node(n->b.get(), vars);
    case Op::Mul: return eval_node(n->a.get(), vars) * eval_node(n->b.get(), vars);
    case Op::Div: return eval_node(n->a.get(), vars) / eval_node(n->b.get(), vars);
    case Op::Neg: return -eval_node(n->a.get(), vars);
    case Op::Pow: return std::pow(eval_node(n->a.get(), vars), eval_node(n->b.get(), vars));
    case Op::Exp: return std::exp(eval_node(n->a.get(), vars));
    case Op::Sqrt: return std::sqrt(eval_node(n->a.get(), vars));
  }
  fail(Code::Internal, "bad expression node");
}

NodePtr diff_node(const NodePtr& n, int var);

NodePtr diff_pow(const NodePtr& n, int var) {
  // d(a^b): constant exponent gets the plain power rule so that negative bases
  // with integer exponents stay differentiable.
  double c;
  NodePtr da = diff_node(n->a, var);
  if (const_value(n->b, &c)) {
    NodePtr p = simplify(Op::Pow, n->a, make_const(c - 1.0));
    return simplify(Op::Mul, simplify(Op::Mul, make_const(c), p), da);
  }
  // a^b with varying b would need a log node; the grammar has none, so only
  // exponents that are constant along this variable are differentiable.
  NodePtr db = diff_node(n->b, var);
  double zero;
  if (const_value(db, &zero) && zero == 0.0) {
    NodePtr p = simplify(Op::Pow, n->a, simplify(Op::Sub, n->b, make_const(1.0)));
    return simplify(Op::Mul, simplify(Op::Mul, n->b, p), da);
  }
  fail(Code::DomainError, "derivative of a^b with non-constant exponent is not supported");
}

NodePtr diff_node(const NodePtr& n, int var) {
  switch (n->op) {
    case Op::Const: return make_const(0.0);
    case Op::Var: return make_const(n->var == var ? 1.0 : 0.0);
    case Op::Add: return simplify(Op::Add, diff_node(n->a, var), diff_node(n->b, var));
    case Op::Sub: return simplify(Op::Sub, diff_node(n->a, var), diff_node(n->b, var));
    case Op::Mul:
      return simplify(Op::Add, simplify(Op::Mul, diff_node(n->a, var), n->b),
                      simplify(Op::Mul, n->a, diff_node(n->b, var)));
    case Op::Div: {
      NodePtr num = simplify(Op::Sub, simplify(Op::Mul, diff_node(n->a, var), n->b),
                             simplify(Op::Mul, n->a, diff_node(n->b, var)));
      return simplify(Op::Div, num, simplify(Op::Mul, n->b, n->b));
    }
    case Op::Neg: return simplify(Op::Neg, diff_node(n->a, var));
    case Op::Pow: return diff_pow(n, var);
    case Op::Exp: return simplify(Op::Mul, make_node(Op::Exp, n->a), diff_node(n->a, var));
    case Op::Sqrt: {
      NodePtr half = make_const(0.5);
      NodePtr inv = simplify(Op::Div, half, make_node(Op::Sqrt, n->a));
      return simplify(Op::Mul, inv, diff_node(n->a, var));
    }
  }
  fail(Code::Internal, "bad expression node");
}

void print_node(const Expr::Node* n, std::ostream& os) {
  switch (n->op) {
    case Op::Const: {
      std::ostringstream tmp;
      tmp.precision(17);
      tmp << n->value;
      os << tmp.str();
      return;
    }
    case Op::Var: os << "@" << n->var; return;
    case Op::Add: os << "("; print_node(n->a.get(), os); os << " + "; print_node(n->b.get(), os); os << ")"; return;
    case Op::Sub: os << "("; print_node(n->a.get(), os); os << " - "; print_node(n->b.get(), os); os << ")"; return;
    case Op::Mul: os << "("; print_node(n->a.get(), os); os << " * "; print_node(n->b.get(), os); os << ")"; return;
    case Op::Div: os << "("; print_node(n->a.get(), os); os << " / "; print_node(n->b.get(), os); os << ")"; return;
    case Op::Neg: os << "(-"; print_node(n->a.get(), os); os << ")"; return;
    case Op::Pow: os << "("; print_node(n->a.get(), os); os << " ^ "; print_node(n->b.get(), os); os << ")"; return;
    case Op::Exp: os << "exp("; print_node(n->a.get(), os); os << ")"; return;
    case Op::Sqrt: os << "sqrt("; print_node(n->a.get(), os); os << ")"; return;
  }
}

class Parser {
 public:
  Parser(const std::string& text, const std::vector<std::string>& vars)
      : text_(text), vars_(vars) {}

  NodePtr run() {
    NodePtr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) error("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void error(const std::string& what) const {
    std::ostringstream os;
    os << "expression parse error at offset " << pos_ << ": " << what;
    fail(Code::ParseError, os.str());
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      if (eat('+')) lhs = simplify(Op::Add, lhs, parse_term());
      else if (eat('-')) lhs = simplify(Op::Sub, lhs, parse_term());
      else return lhs;
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    for (;;) {
      if (eat('*')) lhs = simplify(Op::Mul, lhs, parse_unary());
      else if (eat('/')) lhs = simplify(Op::Div, lhs, parse_unary());
      else return lhs;
    }
  }

  NodePtr parse_unary() {
    if (eat('-')) return simplify(Op::Neg, parse_unary());
    if (eat('+')) return parse_unary();
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_atom();
    if (eat('^')) return simplify(Op::Pow, base, parse_unary());  // right-assoc
    return base;
  }

  NodePtr parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) error("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_expr();
      if (!eat(')')) error("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    error(std::string("unexpected character '") + c + "'");
  }

  NodePtr parse_number() {
    size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      size_t mark = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = mark;  // 'e' was not an exponent
      }
    }
    try {
      return make_const(std::stod(text_.substr(start, pos_ - start)));
    } catch (const std::exception&) {
      pos_ = start;
      error("malformed number");
    }
  }

  NodePtr parse_ident() {
    size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                   text_[pos_] == '_'))
      ++pos_;
    std::string name = text_.substr(start, pos_ - start);
    if (peek() == '(') {
      ++pos_;  // consume '('
      if (name == "exp" || name == "sqrt") {
        NodePtr arg = parse_expr();
        if (!eat(')')) error("expected ')' after argument of " + name);
        return simplify(name == "exp" ? Op::Exp : Op::Sqrt, arg);
      }
      if (name == "pow") {
        NodePtr a = parse_expr();
        if (!eat(',')) error("expected ',' in pow(a, b)");
        NodePtr b = parse_expr();
        if (!eat(')')) error("expected ')' after pow arguments");
        return simplify(Op::Pow, a, b);
      }
      pos_ = start;
      error("unknown function '" + name + "'");
    }
    for (size_t i = 0; i < vars_.size(); ++i)
      if (vars_[i] == name) return make_var(static_cast<int>(i));
    pos_ = start;
    error("unknown identifier '" + name + "'");
  }

  const std::string& text_;
  const std::vector<std::string>& vars_;
  size_t pos_ = 0;
};

}  // namespace

Expr::Expr() : node_(make_const(0.0)) {}

Expr Expr::constant(double v) { return Expr(make_const(v)); }
Expr Expr::variable(int index) { return Expr(make_var(index)); }

Expr Expr::parse(const std::string& text, const std::vector<std::string>& variables) {
  return Expr(Parser(text, variables).run());
}

double Expr::eval(std::span<const double> vars) const { return eval_node(node_.get(), vars); }

Expr Expr::derivative(int var_index) const { return Expr(diff_node(node_, var_index)); }

bool Expr::is_constant(double* value) const { return const_value(node_, value); }

std::string Expr::to_string() const {
  std::ostringstream os;
  print_node(node_.get(), os);
  return os.str();
}

Expr Expr::operator+(const Expr& o) const { return Expr(simplify(Op::Add, node_, o.node_)); }
Expr Expr::operator-(const Expr& o) const { return Expr(simplify(Op::Sub, node_, o.node_)); }
Expr Expr::operator*(const Expr& o) const { return Expr(simplify(Op::Mul, node_, o.node_)); }
Expr Expr::operator/(const Expr& o) const { return Expr(simplify(Op::Div, node_, o.node_)); }

}  // namespace abf
