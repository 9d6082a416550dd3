#include <cmath>
#include <stdexcept>

#include "cqcert/error.hpp"
#include "cqcert/expr/expr.hpp"

namespace cqcert::expr {

namespace {

Expr c(double v) { return Expr::constant(v); }
Expr add(Expr a, Expr b) { return Expr::binary(Op::Add, std::move(a), std::move(b)); }
Expr sub(Expr a, Expr b) { return Expr::binary(Op::Sub, std::move(a), std::move(b)); }
Expr mul(Expr a, Expr b) { return Expr::binary(Op::Mul, std::move(a), std::move(b)); }
Expr divide(Expr a, Expr b) { return Expr::binary(Op::Div, std::move(a), std::move(b)); }
Expr neg(Expr a) { return Expr::unary(Op::Neg, std::move(a)); }

bool all_constant(const Expr& e) {
  for (std::size_t i = 0; i < e.arity(); ++i)
    if (!e.child(i).is_constant()) return false;
  return true;
}

// Folds a node whose children are all constants; leaves it alone when the
// operation is out of domain or produces a non-finite value.
Expr fold(const Expr& e) {
  try {
    const double v = eval(e, Env{});
    if (std::isfinite(v)) return c(v);
  } catch (const DomainError&) {
  }
  return e;
}

Expr rebuild(const Expr& e, std::vector<Expr> kids) {
  switch (e.op()) {
    case Op::Neg:
    case Op::Sin:
    case Op::Cos:
    case Op::Exp:
    case Op::Log:
    case Op::Sqrt:
      return Expr::unary(e.op(), std::move(kids[0]));
    case Op::Pow:
      return Expr::power(std::move(kids[0]), e.exponent());
    default:
      return Expr::binary(e.op(), std::move(kids[0]), std::move(kids[1]));
  }
}

Expr simplify_node(const Expr& e) {
  if (e.arity() == 0) return e;
  std::vector<Expr> kids;
  kids.reserve(e.arity());
  for (std::size_t i = 0; i < e.arity(); ++i) kids.push_back(simplify_node(e.child(i)));
  Expr node = rebuild(e, kids);
  if (all_constant(node)) {
    Expr folded = fold(node);
    if (folded.is_constant()) return folded;
  }
  switch (node.op()) {
    case Op::Neg:
      if (kids[0].op() == Op::Neg) return kids[0].child(0);
      return node;
    case Op::Add:
      if (kids[0].is_constant(0.0)) return kids[1];
      if (kids[1].is_constant(0.0)) return kids[0];
      return node;
    case Op::Sub:
      if (kids[1].is_constant(0.0)) return kids[0];
      if (kids[0].is_constant(0.0)) return simplify_node(neg(kids[1]));
      return node;
    case Op::Mul:
      if (kids[0].is_constant(0.0) || kids[1].is_constant(0.0)) return c(0.0);
      if (kids[0].is_constant(1.0)) return kids[1];
      if (kids[1].is_constant(1.0)) return kids[0];
      if (kids[0].is_constant(-1.0)) return simplify_node(neg(kids[1]));
      if (kids[1].is_constant(-1.0)) return simplify_node(neg(kids[0]));
      // Constants move to the front of products: e*c -> c*e, a*(c*b) -> (c*a)*b.
      if (kids[1].is_constant() && !kids[0].is_constant()) return simplify_node(mul(kids[1], kids[0]));
      if (kids[1].op() == Op::Mul && kids[1].child(0).is_constant() && !kids[0].is_constant())
        return simplify_node(mul(mul(kids[1].child(0), kids[0]), kids[1].child(1)));
      return node;
    case Op::Div:
      if (kids[1].is_constant(1.0)) return kids[0];
      if (kids[0].is_constant(0.0)) return c(0.0);
      return node;
    case Op::Pow:
      if (node.exponent() == 1) return kids[0];
      if (node.exponent() == 0) return c(1.0);
      if (kids[0].op() == Op::Pow) {
        const long long k = static_cast<long long>(kids[0].exponent()) * node.exponent();
        // (u^a)^b = u^(ab) only when no sign or domain information is lost.
        if (kids[0].exponent() > 0 && node.exponent() > 0 && k <= 4096)
          return simplify_node(Expr::power(kids[0].child(0), static_cast<int>(k)));
      }
      return node;
    default:
      return node;
  }
}

Expr diff_node(const Expr& e, int slot) {
  switch (e.op()) {
    case Op::Const:
      return c(0.0);
    case Op::Var:
      return c(e.slot() == slot ? 1.0 : 0.0);
    case Op::Neg:
      return neg(diff_node(e.child(0), slot));
    case Op::Sin:
      return mul(Expr::unary(Op::Cos, e.child(0)), diff_node(e.child(0), slot));
    case Op::Cos:
      return mul(neg(Expr::unary(Op::Sin, e.child(0))), diff_node(e.child(0), slot));
    case Op::Exp:
      return mul(e, diff_node(e.child(0), slot));
    case Op::Log:
      return divide(diff_node(e.child(0), slot), e.child(0));
    case Op::Sqrt:
      return divide(diff_node(e.child(0), slot), mul(c(2.0), e));
    case Op::Add:
      return add(diff_node(e.child(0), slot), diff_node(e.child(1), slot));
    case Op::Sub:
      return sub(diff_node(e.child(0), slot), diff_node(e.child(1), slot));
    case Op::Mul:
      return add(mul(diff_node(e.child(0), slot), e.child(1)),
                 mul(e.child(0), diff_node(e.child(1), slot)));
    case Op::Div:
      return divide(sub(mul(diff_node(e.child(0), slot), e.child(1)),
                        mul(e.child(0), diff_node(e.child(1), slot))),
                    Expr::power(e.child(1), 2));
    case Op::Pow: {
      const int k = e.exponent();
      if (k == 0) return c(0.0);
      return mul(mul(c(static_cast<double>(k)), Expr::power(e.child(0), k - 1)),
                 diff_node(e.child(0), slot));
    }
  }
  throw std::logic_error("unhandled operator");
}

}  // namespace

Expr simplify(const Expr& e) { return simplify_node(e); }

Expr diff(const Expr& e, int slot) {
  if (slot < 0) throw std::invalid_argument("negative variable slot");
  return simplify_node(diff_node(e, slot));
}

}  // namespace cqcert::expr
