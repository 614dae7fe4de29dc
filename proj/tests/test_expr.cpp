#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "error.hpp"
#include "expr.hpp"

using namespace abf;

namespace {
const std::vector<std::string> kVars = {"x0", "x1", "x2", "x3"};

double ev(const Expr& e, std::initializer_list<double> vals) {
  std::vector<double> v(vals);
  return e.eval(v);
}
}  // namespace

TEST_CASE("arithmetic and precedence") {
  Expr e = Expr::parse("x0 + 2*x1 - x2/4", kVars);
  CHECK(ev(e, {1.0, 2.0, 8.0, 0.0}) == doctest::Approx(1 + 4 - 2));
  CHECK(ev(Expr::parse("2 + 3*4", kVars), {0, 0, 0, 0}) == 14.0);
  CHECK(ev(Expr::parse("(2 + 3)*4", kVars), {0, 0, 0, 0}) == 20.0);
  CHECK(ev(Expr::parse("-x0^2", kVars), {3, 0, 0, 0}) == -9.0);  // unary binds after ^
  CHECK(ev(Expr::parse("2^3^2", kVars), {0, 0, 0, 0}) == 512.0);  // right assoc
}

TEST_CASE("functions") {
  CHECK(ev(Expr::parse("exp(0)", kVars), {0, 0, 0, 0}) == 1.0);
  CHECK(ev(Expr::parse("sqrt(x0)", kVars), {16, 0, 0, 0}) == 4.0);
  CHECK(ev(Expr::parse("pow(x0, 3)", kVars), {2, 0, 0, 0}) == 8.0);
  CHECK(ev(Expr::parse("exp(2*x0) * sqrt(x1)", kVars), {0.5, 9, 0, 0}) ==
        doctest::Approx(std::exp(1.0) * 3.0));
  CHECK(ev(Expr::parse("1.5e2 + 1e-1", kVars), {0, 0, 0, 0}) == doctest::Approx(150.1));
}

TEST_CASE("parse errors carry the position") {
  CHECK_THROWS_WITH_AS(Expr::parse("exp(", kVars), doctest::Contains("offset"), Error);
  CHECK_THROWS_AS(Expr::parse("x9 + 1", kVars), Error);
  CHECK_THROWS_AS(Expr::parse("2 +* 3", kVars), Error);
  CHECK_THROWS_AS(Expr::parse("foo(1)", kVars), Error);
  CHECK_THROWS_AS(Expr::parse("1 2", kVars), Error);
  try {
    Expr::parse("x0 + exp(", kVars);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Code::ParseError);
  }
}

TEST_CASE("symbolic derivative matches finite differences") {
  Expr e = Expr::parse("exp(2*x0)*x1^3 + sqrt(x2 + 1) - x0/x1", kVars);
  Expr d0 = e.derivative(0);
  Expr d1 = e.derivative(1);
  std::vector<double> x = {0.3, 1.7, 2.0, 0.0};
  double h = 1e-6;
  for (int var : {0, 1}) {
    std::vector<double> xp = x, xm = x;
    xp[var] += h;
    xm[var] -= h;
    double fd = (e.eval(xp) - e.eval(xm)) / (2 * h);
    double an = (var == 0 ? d0 : d1).eval(x);
    CHECK(an == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("derivative of constant-exponent powers keeps negative bases usable") {
  Expr e = Expr::parse("x0^3", kVars);
  Expr d = e.derivative(0);
  CHECK(ev(d, {-2, 0, 0, 0}) == doctest::Approx(12.0));
}

TEST_CASE("second derivatives via repeated differentiation") {
  Expr e = Expr::parse("1 - x1^2/(2*x0^2)", kVars);  // the Maxwell-Boltzmann P with bb = x1
  Expr d = e.derivative(0);
  Expr d2 = d.derivative(0);
  double s = 1.3, bb = 0.7;
  CHECK(ev(d, {s, bb, 0, 0}) == doctest::Approx(bb * bb / (s * s * s)).epsilon(1e-12));
  CHECK(ev(d2, {s, bb, 0, 0}) == doctest::Approx(-3 * bb * bb / (s * s * s * s)).epsilon(1e-12));
}

TEST_CASE("is_constant and folding") {
  double v = 0;
  CHECK(Expr::parse("2*3 + 1", kVars).is_constant(&v));
  CHECK(v == 7.0);
  CHECK_FALSE(Expr::parse("x0", kVars).is_constant(&v));
  CHECK(Expr::parse("0*x0 + 5", kVars).is_constant(&v));
  CHECK(v == 5.0);
}
