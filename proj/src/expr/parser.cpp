#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <string>

#include "cqcert/error.hpp"
#include "cqcert/expr/expr.hpp"

namespace cqcert::expr {

namespace {

constexpr int kMaxExponent = 4096;

class Parser {
 public:
  Parser(std::string_view text, int n_vars) : text_(text), n_vars_(n_vars) {}

  Expr parse_all() {
    skip_ws();
    if (at_end()) fail("empty expression");
    Expr e = parse_expr();
    skip_ws();
    if (!at_end()) fail(std::string("unexpected character '") + text_[pos_] + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }
  [[noreturn]] void fail_at(const std::string& msg, std::size_t at) const {
    throw ParseError(msg, at);
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (at_end()) fail(std::string("expected '") + c + "' but input ended");
      fail(std::string("expected '") + c + "'");
    }
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    for (;;) {
      skip_ws();
      if (accept('+')) {
        lhs = Expr::binary(Op::Add, lhs, parse_term());
      } else if (accept('-')) {
        lhs = Expr::binary(Op::Sub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_term() {
    Expr lhs = parse_factor();
    for (;;) {
      if (accept('*')) {
        lhs = Expr::binary(Op::Mul, lhs, parse_factor());
      } else if (accept('/')) {
        lhs = Expr::binary(Op::Div, lhs, parse_factor());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_factor() {
    Expr base = parse_atom();
    if (accept('^')) return Expr::power(base, parse_exponent());
    return base;
  }

  // Signed integer literal or a parenthesized constant expression that folds
  // to an integer, optionally followed by '^' exponent (right-associative).
  int parse_exponent() {
    skip_ws();
    const std::size_t start = pos_;
    double value = 0.0;
    if (peek() == '(') {
      ++pos_;
      Expr inner = parse_expr();
      expect(')');
      Expr folded = simplify(inner);
      if (!folded.is_constant()) fail_at("non-integer exponent (must be an integer constant)", start);
      value = folded.value();
    } else {
      bool negative = false;
      if (peek() == '-' || peek() == '+') {
        negative = peek() == '-';
        ++pos_;
        skip_ws();
      }
      if (!(std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.'))
        fail("expected integer exponent");
      value = parse_number_literal();
      if (negative) value = -value;
    }
    if (value != std::floor(value) || !std::isfinite(value))
      fail_at("non-integer exponent", start);
    if (std::fabs(value) > kMaxExponent) fail_at("exponent out of range", start);
    int k = static_cast<int>(value);
    if (accept('^')) {
      const std::size_t inner_at = pos_;
      const int e2 = parse_exponent();
      if (e2 < 0) fail_at("negative exponent in a tower yields a non-integer", inner_at);
      double folded = std::pow(static_cast<double>(k), e2);
      if (std::fabs(folded) > kMaxExponent) fail_at("exponent out of range", start);
      k = static_cast<int>(folded);
    }
    return k;
  }

  double parse_number_literal() {
    const std::size_t start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (peek() == '.') {
      ++pos_;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    if (peek() == 'e' || peek() == 'E') {
      std::size_t save = pos_;
      ++pos_;
      if (peek() == '+' || peek() == '-') ++pos_;
      if (!std::isdigit(static_cast<unsigned char>(peek()))) {
        pos_ = save;
      } else {
        while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    double value = 0.0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) fail_at("malformed number", start);
    return value;
  }

  Expr parse_atom() {
    skip_ws();
    if (at_end()) fail("unexpected end of input");
    const char c = peek();
    if (c == '(') {
      ++pos_;
      Expr inner = parse_expr();
      expect(')');
      return inner;
    }
    if (c == '-') {
      ++pos_;
      return Expr::unary(Op::Neg, parse_factor());
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return Expr::constant(parse_number_literal());
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                           text_[pos_] == '_'))
        ++pos_;
      const std::string_view name = text_.substr(start, pos_ - start);
      return parse_identifier(name, start);
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  Expr parse_identifier(std::string_view name, std::size_t start) {
    static constexpr std::pair<std::string_view, Op> funcs[] = {
        {"sin", Op::Sin}, {"cos", Op::Cos}, {"exp", Op::Exp}, {"log", Op::Log}, {"sqrt", Op::Sqrt}};
    for (const auto& [fname, op] : funcs) {
      if (name == fname) {
        if (!accept('(')) fail("expected '(' after function " + std::string(fname));
        Expr arg = parse_expr();
        expect(')');
        return Expr::unary(op, arg);
      }
    }
    if (name == "t") return Expr::param();
    if (name.size() >= 2 && name[0] == 'x' && name[1] != '0') {
      int index = 0;
      auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), index);
      if (ec == std::errc() && ptr == name.data() + name.size() && index >= 1 &&
          index <= n_vars_)
        return Expr::x(index);
    }
    fail_at("unknown identifier '" + std::string(name) + "'", start);
  }

  std::string_view text_;
  int n_vars_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text, int n_vars) {
  if (n_vars < 1) throw std::invalid_argument("n_vars must be positive");
  return Parser(text, n_vars).parse_all();
}

}  // namespace cqcert::expr
