// Small analytic expression grammar used by run configurations:
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' unary)?
//   primary := number | name | func '(' expr ')' | '(' expr ')'
//
// Functions: sin, cos, exp, sqrt. Constants: pi, e. Names resolve against the
// variable list given at parse time (e.g. x, y, z, t).
#ifndef CARTAN_EXPRESSION_HPP_
#define CARTAN_EXPRESSION_HPP_

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace cartan {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int column)
      : std::runtime_error(what + " (column " + std::to_string(column) + ")"), column_(column) {}
  int column() const { return column_; }

 private:
  int column_;
};

class Expression {
 public:
  struct Node;

  static Expression parse(std::string_view text, const std::vector<std::string>& variables);

  double operator()(const Eigen::VectorXd& values) const;
  const std::string& text() const { return text_; }

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace cartan

#endif  // CARTAN_EXPRESSION_HPP_
