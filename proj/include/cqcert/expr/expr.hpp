#pragma once

// Scalar expression language over x1..xn and the index parameter t.
//
// Grammar:
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := atom ('^' exponent)?
//   atom   := number | ident | '(' expr ')' | func '(' expr ')' | '-' factor
//   func   := sin | cos | exp | log | sqrt
//   ident  := x1 .. xn | t
//
// Exponents must be integer constants; '^' is right-associative and binds
// tighter than unary minus, which binds tighter than '*' and '/'.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cqcert::expr {

enum class Op : std::uint8_t {
  Const,
  Var,
  Neg,
  Sin,
  Cos,
  Exp,
  Log,
  Sqrt,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
};

/// Variable slot of the index parameter t. Slots 1..n are x1..xn.
inline constexpr int kParamSlot = 0;

/// Immutable expression tree with value semantics. Copies share nodes.
class Expr {
 public:
  /// The constant 0.
  Expr();

  static Expr constant(double value);
  static Expr variable(int slot);
  static Expr x(int index) { return variable(index); }
  static Expr param() { return variable(kParamSlot); }
  /// Neg of a constant folds to the negated constant, so the tree never
  /// holds Neg(Const).
  static Expr unary(Op op, Expr arg);
  static Expr binary(Op op, Expr lhs, Expr rhs);
  static Expr power(Expr base, int exponent);

  Op op() const noexcept;
  double value() const noexcept;  // Const
  int slot() const noexcept;      // Var
  int exponent() const noexcept;  // Pow
  std::size_t arity() const noexcept;
  const Expr& child(std::size_t i) const;

  bool is_constant() const noexcept { return op() == Op::Const; }
  bool is_constant(double v) const noexcept { return is_constant() && value() == v; }

  /// Largest x-index referenced (0 when no x variable occurs).
  int max_x_index() const;
  bool uses_param() const;
  std::size_t node_count() const;

  /// Structural equality.
  friend bool operator==(const Expr& a, const Expr& b);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Variable bindings: x[i-1] binds xi; t is optional.
struct Env {
  std::span<const double> x;
  std::optional<double> t;
};

/// Result of an evaluation that propagates non-finite values instead of
/// throwing on them.
struct Evaluation {
  double value;
  bool nonfinite;  // NaN or Inf produced
};

Expr parse(std::string_view text, int n_vars);

/// Throws DomainError for log(<=0), sqrt(<0), division by zero, 0^negative;
/// DimensionError for an unbound variable.
double eval(const Expr& e, const Env& env);
Evaluation evaluate(const Expr& e, const Env& env);

/// Symbolic partial derivative with respect to `slot`, simplified.
Expr diff(const Expr& e, int slot);

/// Constant folding and identity elimination.
Expr simplify(const Expr& e);

/// Text that parses back to a structurally identical tree.
std::string to_string(const Expr& e);

std::string slot_name(int slot);

}  // namespace cqcert::expr
