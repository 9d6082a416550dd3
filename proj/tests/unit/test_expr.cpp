#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "cqcert/error.hpp"
#include "cqcert/expr/expr.hpp"
#include "cqcert/rng.hpp"

using namespace cqcert;
using expr::Expr;
using expr::Op;

namespace {

double at(const Expr& e, std::vector<double> x, std::optional<double> t = std::nullopt) {
  return expr::eval(e, expr::Env{x, t});
}

bool close_rel(double a, double b, double tol) {
  return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

// Random trees over x1..x3 and t. Functions are restricted to ones defined
// everywhere so pointwise checks never leave the domain.
Expr random_tree(Rng& rng, int depth) {
  if (depth == 0 || rng.below(4) == 0) {
    switch (rng.below(3)) {
      case 0:
        return Expr::constant(std::round(rng.uniform(-4.0, 4.0) * 4.0) / 4.0);
      case 1:
        return Expr::param();
      default:
        return Expr::x(1 + static_cast<int>(rng.below(3)));
    }
  }
  switch (rng.below(7)) {
    case 0:
      return Expr::binary(Op::Add, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 1:
      return Expr::binary(Op::Sub, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 2:
      return Expr::binary(Op::Mul, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 3:
      return Expr::power(random_tree(rng, depth - 1), 1 + static_cast<int>(rng.below(3)));
    case 4:
      return Expr::unary(Op::Neg, random_tree(rng, depth - 1));
    case 5:
      return Expr::unary(Op::Sin, random_tree(rng, depth - 1));
    default:
      return Expr::unary(Op::Exp, Expr::binary(Op::Mul, Expr::constant(0.25), random_tree(rng, depth - 1)));
  }
}

std::vector<double> random_point(Rng& rng) {
  return {rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
}

}  // namespace

TEST_CASE("parse: single power node") {
  const Expr e = expr::parse("x1^2", 3);
  CHECK(e.op() == Op::Pow);
  CHECK(e.exponent() == 2);
  CHECK(e.child(0).op() == Op::Var);
  CHECK(e.child(0).slot() == 1);
}

TEST_CASE("parse: family inequality of the three-dimensional example") {
  const Expr e = expr::parse("t*x1^2 + x1 - x2 + x3", 3);
  const Expr expected = Expr::binary(
      Op::Add,
      Expr::binary(Op::Sub,
                   Expr::binary(Op::Add, Expr::binary(Op::Mul, Expr::param(), Expr::power(Expr::x(1), 2)),
                                Expr::x(1)),
                   Expr::x(2)),
      Expr::x(3));
  CHECK(e == expected);
  CHECK(e.uses_param());
  CHECK(e.max_x_index() == 3);
}

TEST_CASE("parse: rejections") {
  CHECK_THROWS_AS(expr::parse("x1^(1/2)", 3), ParseError);
  CHECK_THROWS_AS(expr::parse("x1^1.5", 3), ParseError);
  CHECK_THROWS_AS(expr::parse("x4", 3), ParseError);
  CHECK_THROWS_AS(expr::parse("x0", 3), ParseError);
  CHECK_THROWS_AS(expr::parse("x1 +", 3), ParseError);
  CHECK_THROWS_AS(expr::parse("(x1", 3), ParseError);
  CHECK_THROWS_AS(expr::parse("foo(x1)", 3), ParseError);
  CHECK_THROWS_AS(expr::parse("", 3), ParseError);
  CHECK_THROWS_AS(expr::parse("x1 x2", 3), ParseError);
}

TEST_CASE("parse: error offset points at the offending token") {
  try {
    expr::parse("x1 + x9", 3);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 5);
  }
}

TEST_CASE("parse: precedence and associativity") {
  // '^' binds tighter than unary minus.
  CHECK(at(expr::parse("-x1^2", 1), {3.0}) == doctest::Approx(-9.0));
  // Right-associative power.
  CHECK(at(expr::parse("2^3^2", 1), {0.0}) == doctest::Approx(512.0));
  CHECK(at(expr::parse("1 - 2 - 3", 1), {0.0}) == doctest::Approx(-4.0));
  CHECK(at(expr::parse("8 / 4 / 2", 1), {0.0}) == doctest::Approx(1.0));
  CHECK(at(expr::parse("2 * -x1", 1), {3.0}) == doctest::Approx(-6.0));
  CHECK(at(expr::parse("sqrt(x1) * exp(0) + log(1) + cos(0) - sin(0)", 1), {4.0}) == doctest::Approx(3.0));
}

TEST_CASE("eval: direct arithmetic") {
  CHECK(at(expr::parse("x1^2", 3), {3.0, 0.0, 0.0}) == 9.0);
  CHECK(at(expr::parse("t*x1^2 + x1 - x2 + x3", 3), {0.0, 0.0, 0.0}, 0.5) == 0.0);
  CHECK(at(expr::parse("x1^3 + x2", 2), {1.0, 0.0}) == 1.0);
}

TEST_CASE("eval: domain and binding errors") {
  CHECK_THROWS_AS(at(expr::parse("log(x1)", 1), {0.0}), DomainError);
  CHECK_THROWS_AS(at(expr::parse("sqrt(x1)", 1), {-1.0}), DomainError);
  CHECK_THROWS_AS(at(expr::parse("1 / x1", 1), {0.0}), DomainError);
  CHECK_THROWS_AS(at(expr::parse("x1^-1", 1), {0.0}), DomainError);
  CHECK_THROWS_AS(at(expr::parse("t*x1", 1), {1.0}), DimensionError);
  CHECK_THROWS_AS(at(expr::parse("x2", 2), {1.0}), DimensionError);
  const expr::Evaluation ev = expr::evaluate(expr::parse("exp(x1)", 1), expr::Env{std::vector<double>{1000.0}, {}});
  CHECK(ev.nonfinite);
}

TEST_CASE("diff: worked derivatives") {
  const Expr g = expr::parse("t*x1^2 + x1 - x2 + x3", 3);
  CHECK(expr::to_string(expr::diff(g, 1)) == "2*t*x1 + 1");
  CHECK(expr::to_string(expr::diff(expr::parse("x1^2", 3), 1)) == "2*x1");
  CHECK(expr::diff(expr::parse("x1 + x2", 3), 3).is_constant(0.0));
  const Expr dg = expr::diff(g, 1);
  for (double t : {0.1, 0.5, 0.9})
    for (double x1 : {-1.0, 0.0, 2.0}) CHECK(at(dg, {x1, 0.0, 0.0}, t) == doctest::Approx(2.0 * t * x1 + 1.0));
  CHECK(expr::to_string(expr::diff(g, 2)) == "-1");
}

TEST_CASE("simplify: identities and folding") {
  CHECK(expr::to_string(expr::simplify(expr::parse("0*x1 + x2", 2))) == "x2");
  CHECK(expr::to_string(expr::simplify(expr::parse("2*0.5", 1))) == "1");
  CHECK(expr::to_string(expr::simplify(expr::diff(expr::parse("x1 - x2", 3), 3))) == "0");
  CHECK(expr::to_string(expr::simplify(expr::parse("1*x1^1", 1))) == "x1");
}

TEST_CASE("property: print/parse round trip on generated trees") {
  Rng rng(11, Stream::Testing);
  for (int k = 0; k < 300; ++k) {
    const Expr e = random_tree(rng, 4);
    const std::string text = expr::to_string(e);
    INFO(text);
    CHECK(expr::parse(text, 3) == e);
  }
}

TEST_CASE("property: derivative linearity and product rule") {
  Rng rng(12, Stream::Testing);
  for (int k = 0; k < 40; ++k) {
    const Expr a = random_tree(rng, 3);
    const Expr b = random_tree(rng, 3);
    const int slot = static_cast<int>(rng.below(4));
    const Expr d_sum = expr::diff(Expr::binary(Op::Add, a, b), slot);
    const Expr d_prod = expr::diff(Expr::binary(Op::Mul, a, b), slot);
    const Expr da = expr::diff(a, slot);
    const Expr db = expr::diff(b, slot);
    for (int p = 0; p < 100; ++p) {
      const std::vector<double> x = random_point(rng);
      const double t = rng.uniform(0.0, 1.0);
      const double va = at(a, x, t), vb = at(b, x, t), vda = at(da, x, t), vdb = at(db, x, t);
      CHECK(close_rel(at(d_sum, x, t), vda + vdb, 1e-12));
      const double rhs = vda * vb + va * vdb;
      // Scale by the magnitude of the summands so cancellation is not
      // mistaken for an error.
      const double scale = std::max({1.0, std::fabs(vda * vb), std::fabs(va * vdb)});
      CHECK(std::fabs(at(d_prod, x, t) - rhs) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("property: simplify preserves value") {
  Rng rng(13, Stream::Testing);
  for (int k = 0; k < 60; ++k) {
    const Expr e = random_tree(rng, 4);
    const Expr s = expr::simplify(e);
    CHECK(s.node_count() <= e.node_count());
    for (int p = 0; p < 100; ++p) {
      const std::vector<double> x = random_point(rng);
      const double t = rng.uniform(0.0, 1.0);
      CHECK(close_rel(at(s, x, t), at(e, x, t), 1e-12));
    }
  }
}

TEST_CASE("diff: agrees with central differences on transcendental expressions") {
  const Expr e = expr::parse("sin(x1*x2) + exp(x1)/(1 + x2^2) - log(2 + cos(x1)) * sqrt(1 + x2^2)", 2);
  for (double x1 : {-0.7, 0.3, 1.1}) {
    for (double x2 : {-0.4, 0.8}) {
      for (int slot = 1; slot <= 2; ++slot) {
        const double h = 1e-6;
        std::vector<double> p = {x1, x2}, m = {x1, x2};
        p[static_cast<std::size_t>(slot - 1)] += h;
        m[static_cast<std::size_t>(slot - 1)] -= h;
        const double fd = (at(e, p) - at(e, m)) / (2 * h);
        CHECK(at(expr::diff(e, slot), {x1, x2}) == doctest::Approx(fd).epsilon(1e-7));
      }
    }
  }
}
