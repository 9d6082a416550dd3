#include "cqcert/expr/expr.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "cqcert/error.hpp"
#include "node.hpp"

namespace cqcert::expr {

Expr::Expr() : Expr(std::make_shared<const Node>(Node{Op::Const, 0.0, 0, {}})) {}

Expr Expr::constant(double value) {
  return Expr(std::make_shared<const Node>(Node{Op::Const, value, 0, {}}));
}

Expr Expr::variable(int slot) {
  if (slot < 0) throw std::invalid_argument("negative variable slot");
  return Expr(std::make_shared<const Node>(Node{Op::Var, 0.0, slot, {}}));
}

Expr Expr::unary(Op op, Expr arg) {
  switch (op) {
    case Op::Neg:
      if (arg.is_constant()) return constant(-arg.value());
      [[fallthrough]];
    case Op::Sin:
    case Op::Cos:
    case Op::Exp:
    case Op::Log:
    case Op::Sqrt:
      return Expr(std::make_shared<const Node>(Node{op, 0.0, 0, {std::move(arg)}}));
    default:
      throw std::invalid_argument("not a unary operator");
  }
}

Expr Expr::binary(Op op, Expr lhs, Expr rhs) {
  switch (op) {
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
      return Expr(
          std::make_shared<const Node>(Node{op, 0.0, 0, {std::move(lhs), std::move(rhs)}}));
    default:
      throw std::invalid_argument("not a binary operator");
  }
}

Expr Expr::power(Expr base, int exponent) {
  return Expr(std::make_shared<const Node>(Node{Op::Pow, 0.0, exponent, {std::move(base)}}));
}

Op Expr::op() const noexcept { return node_->op; }
double Expr::value() const noexcept { return node_->value; }
int Expr::slot() const noexcept { return node_->ival; }
int Expr::exponent() const noexcept { return node_->ival; }
std::size_t Expr::arity() const noexcept { return node_->children.size(); }

const Expr& Expr::child(std::size_t i) const { return node_->children.at(i); }

int Expr::max_x_index() const {
  if (op() == Op::Var) return slot();
  int best = 0;
  for (const auto& c : node_->children) best = std::max(best, c.max_x_index());
  return best;
}

bool Expr::uses_param() const {
  if (op() == Op::Var) return slot() == kParamSlot;
  return std::any_of(node_->children.begin(), node_->children.end(),
                     [](const Expr& c) { return c.uses_param(); });
}

std::size_t Expr::node_count() const {
  std::size_t n = 1;
  for (const auto& c : node_->children) n += c.node_count();
  return n;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.op() != b.op()) return false;
  switch (a.op()) {
    case Op::Const:
      return a.value() == b.value();
    case Op::Var:
      return a.slot() == b.slot();
    case Op::Pow:
      if (a.exponent() != b.exponent()) return false;
      break;
    default:
      break;
  }
  if (a.arity() != b.arity()) return false;
  for (std::size_t i = 0; i < a.arity(); ++i)
    if (!(a.child(i) == b.child(i))) return false;
  return true;
}

std::string slot_name(int slot) {
  return slot == kParamSlot ? std::string("t") : "x" + std::to_string(slot);
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

[[noreturn]] void domain_failure(const char* what, const Expr& sub) {
  throw DomainError(std::string(what) + " in '" + to_string(sub) + "'");
}

double ipow(double base, int k) {
  if (k < 0) return 1.0 / ipow(base, -k);
  double result = 1.0;
  while (k > 0) {
    if (k & 1) result *= base;
    base *= base;
    k >>= 1;
  }
  return result;
}

double eval_node(const Expr& e, const Env& env) {
  switch (e.op()) {
    case Op::Const:
      return e.value();
    case Op::Var: {
      const int s = e.slot();
      if (s == kParamSlot) {
        if (!env.t) throw DimensionError("unbound variable t");
        return *env.t;
      }
      if (static_cast<std::size_t>(s) > env.x.size())
        throw DimensionError("unbound variable " + slot_name(s));
      return env.x[static_cast<std::size_t>(s - 1)];
    }
    case Op::Neg:
      return -eval_node(e.child(0), env);
    case Op::Sin:
      return std::sin(eval_node(e.child(0), env));
    case Op::Cos:
      return std::cos(eval_node(e.child(0), env));
    case Op::Exp:
      return std::exp(eval_node(e.child(0), env));
    case Op::Log: {
      const double a = eval_node(e.child(0), env);
      if (!(a > 0.0)) domain_failure("log of nonpositive value", e);
      return std::log(a);
    }
    case Op::Sqrt: {
      const double a = eval_node(e.child(0), env);
      if (a < 0.0) domain_failure("sqrt of negative value", e);
      return std::sqrt(a);
    }
    case Op::Add:
      return eval_node(e.child(0), env) + eval_node(e.child(1), env);
    case Op::Sub:
      return eval_node(e.child(0), env) - eval_node(e.child(1), env);
    case Op::Mul:
      return eval_node(e.child(0), env) * eval_node(e.child(1), env);
    case Op::Div: {
      const double num = eval_node(e.child(0), env);
      const double den = eval_node(e.child(1), env);
      if (den == 0.0) domain_failure("division by zero", e);
      return num / den;
    }
    case Op::Pow: {
      const double b = eval_node(e.child(0), env);
      if (b == 0.0 && e.exponent() < 0) domain_failure("division by zero", e);
      return ipow(b, e.exponent());
    }
  }
  throw std::logic_error("unhandled operator");
}

}  // namespace

Evaluation evaluate(const Expr& e, const Env& env) {
  const double v = eval_node(e, env);
  return {v, !std::isfinite(v)};
}

double eval(const Expr& e, const Env& env) { return eval_node(e, env); }

// ---------------------------------------------------------------------------
// Printing

namespace {

int precedence(const Expr& e) {
  switch (e.op()) {
    case Op::Add:
    case Op::Sub:
      return 1;
    case Op::Mul:
    case Op::Div:
      return 2;
    case Op::Neg:
      return 3;
    case Op::Pow:
      return 4;
    case Op::Const:
      // A negative literal prints with a leading '-' and binds like Neg.
      return std::signbit(e.value()) ? 3 : 5;
    default:
      return 5;
  }
}

void format_number(double v, std::string& out) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  out.append(buf.data(), end);
}

void print(const Expr& e, std::string& out);

void print_wrapped(const Expr& e, bool wrap, std::string& out) {
  if (wrap) out += '(';
  print(e, out);
  if (wrap) out += ')';
}

void print(const Expr& e, std::string& out) {
  switch (e.op()) {
    case Op::Const:
      format_number(e.value(), out);
      return;
    case Op::Var:
      out += slot_name(e.slot());
      return;
    case Op::Neg:
      out += '-';
      print_wrapped(e.child(0), precedence(e.child(0)) < 4, out);
      return;
    case Op::Sin:
    case Op::Cos:
    case Op::Exp:
    case Op::Log:
    case Op::Sqrt: {
      static constexpr const char* names[] = {"sin", "cos", "exp", "log", "sqrt"};
      out += names[static_cast<int>(e.op()) - static_cast<int>(Op::Sin)];
      out += '(';
      print(e.child(0), out);
      out += ')';
      return;
    }
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      const int p = precedence(e);
      print_wrapped(e.child(0), precedence(e.child(0)) < p, out);
      switch (e.op()) {
        case Op::Add: out += " + "; break;
        case Op::Sub: out += " - "; break;
        case Op::Mul: out += '*'; break;
        default: out += '/'; break;
      }
      print_wrapped(e.child(1), precedence(e.child(1)) <= p, out);
      return;
    }
    case Op::Pow:
      print_wrapped(e.child(0), precedence(e.child(0)) < 5, out);
      out += '^';
      if (e.exponent() < 0) {
        out += "(" + std::to_string(e.exponent()) + ")";
      } else {
        out += std::to_string(e.exponent());
      }
      return;
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

}  // namespace cqcert::expr
