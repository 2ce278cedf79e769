#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cartan/expression.hpp"

using cartan::Expression;
using cartan::ParseError;

namespace {

double eval(const std::string& text, std::initializer_list<double> values = {}) {
  const std::vector<std::string> names = {"x", "y", "t"};
  Eigen::VectorXd v = Eigen::VectorXd::Zero(3);
  int i = 0;
  for (double d : values) v(i++) = d;
  return Expression::parse(text, names)(v);
}

int error_column(const std::string& text) {
  try {
    Expression::parse(text, {"x", "y"});
  } catch (const ParseError& e) {
    return e.column();
  }
  return -1;
}

}  // namespace

TEST_CASE("precedence and associativity") {
  CHECK(eval("1 + 2*3") == 7.0);
  CHECK(eval("(1 + 2)*3") == 9.0);
  CHECK(eval("8 / 4 / 2") == 1.0);
  CHECK(eval("2^3^2") == 512.0);
  CHECK(eval("-2^2") == -4.0);
  CHECK(eval("2^-1") == 0.5);
  CHECK(eval("1.5e2 - 50") == 100.0);
}

TEST_CASE("variables, functions and constants") {
  CHECK(eval("x*y + t", {2.0, 3.0, 4.0}) == 10.0);
  CHECK(eval("sin(pi/2)") == doctest::Approx(1.0));
  CHECK(eval("cos(0) + exp(0) + sqrt(4)") == 4.0);
  CHECK(eval("e") == doctest::Approx(std::numbers::e));
  CHECK(eval("0.7 + 0.5*x - 0.3*y^2", {1.0, 2.0}) == doctest::Approx(0.7 + 0.5 - 1.2));
}

TEST_CASE("syntax errors point at the offending column") {
  CHECK(error_column("1 + q") == 5);
  CHECK(error_column("sin x") == 5);
  CHECK(error_column("(1 + 2") == 7);
  CHECK(error_column("1 2") == 3);
  CHECK(error_column("") == 1);
  CHECK(error_column("x $ y") == 3);
  CHECK(error_column("x + y") == -1);
}
