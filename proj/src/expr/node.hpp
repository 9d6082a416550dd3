#pragma once

#include <vector>

#include "cqcert/expr/expr.hpp"

namespace cqcert::expr {

struct Expr::Node {
  Op op;
  double value;  // Const
  int ival;      // Var slot or Pow exponent
  std::vector<Expr> children;
};

}  // namespace cqcert::expr
