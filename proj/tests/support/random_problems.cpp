#include "random_problems.hpp"

#include <cstdio>

#include "cqcert/rng.hpp"

namespace cqtest {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// Sum of up to four monomials of total degree <= max_degree. With with_t the
// coefficients are affine in t.
std::string polynomial(cqcert::Rng& rng, int n, int max_degree, bool with_t) {
  std::string s;
  const std::size_t terms = 1 + rng.below(4);
  for (std::size_t k = 0; k < terms; ++k) {
    std::string term = "(" + num(rng.uniform(-2.0, 2.0));
    if (with_t && rng.below(2) == 0) term += " + " + num(rng.uniform(-1.0, 1.0)) + "*t";
    term += ")";
    int budget = static_cast<int>(rng.below(static_cast<std::size_t>(max_degree) + 1));
    while (budget > 0) {
      const int var = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(n)));
      const int power = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(budget)));
      term += "*x" + std::to_string(var);
      if (power > 1) term += "^" + std::to_string(power);
      budget -= power;
    }
    if (!s.empty()) s += " + ";
    s += term;
  }
  return s;
}

}  // namespace

std::string random_polynomial_problem(std::uint64_t seed, const RandomProblemShape& shape) {
  cqcert::Rng rng(seed, cqcert::Stream::Testing);
  const int n = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(shape.max_dim)));
  const int m = static_cast<int>(rng.below(static_cast<std::size_t>(shape.max_equalities) + 1));
  std::string text = "name = \"random-" + std::to_string(seed) + "\"\n";
  text += "dim = " + std::to_string(n) + "\n";
  text += "objective = \"" + polynomial(rng, n, shape.max_degree, false) + "\"\n";
  if (m > 0) {
    text += "equality = [";
    for (int i = 0; i < m; ++i) {
      if (i > 0) text += ", ";
      text += "\"" + polynomial(rng, n, shape.max_degree, false) + "\"";
    }
    text += "]\n";
  }
  if (rng.below(2) == 0) {
    text += "inequality = \"" + polynomial(rng, n, shape.max_degree, true) + "\"\n";
    text += "index_set = { type = \"interval\", lo = 0, hi = 1, grid = " + std::to_string(shape.grid_points) +
            " }\n";
  } else {
    const std::size_t k = 1 + rng.below(3);
    text += "inequality_list = [";
    for (std::size_t i = 0; i < k; ++i) {
      if (i > 0) text += ", ";
      text += "\"" + polynomial(rng, n, shape.max_degree, false) + "\"";
    }
    text += "]\n";
  }
  text += "point = [";
  for (int i = 0; i < n; ++i) {
    if (i > 0) text += ", ";
    text += num(rng.uniform(-1.0, 1.0));
  }
  text += "]\n";
  return text;
}

}  // namespace cqtest
