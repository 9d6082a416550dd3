#include <algorithm>
#include <cmath>

#include "cqcert/kernels.hpp"
#include "cqcert/model/problem.hpp"

namespace cqcert::model {

double relative_discrepancy(double a, double b) {
  return std::fabs(a - b) / std::max({1.0, std::fabs(a), std::fabs(b)});
}

std::vector<std::size_t> active_positions(const numkit::Vector& g, double eps) {
  const double threshold = -std::max(eps, kActiveTol);
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (g[k] >= threshold) out.push_back(k);
  return out;
}

GValues Problem::eval_G(const numkit::Vector& x) const {
  GValues out;
  out.h = equalities(x);
  out.g = inequalities(x);
  out.k_violation = std::max({0.0, kernels::max_abs(out.h), kernels::max_element(out.g)});
  return out;
}

IndexSubset Problem::eps_active_set(const numkit::Vector& x, double eps) const {
  if (!(eps >= 0.0)) throw std::invalid_argument("eps_active_set: eps must be nonnegative");
  IndexSubset s;
  s.eps = eps;
  const numkit::Vector g = inequalities(x);
  s.members = active_positions(g, eps);
  for (std::size_t k : s.members) {
    s.t.push_back(t_values_[k]);
    s.g.push_back(g[k]);
  }
  return s;
}

}  // namespace cqcert::model
