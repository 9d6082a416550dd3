#pragma once

// Bounded-variable primal simplex (dense tableau, Bland's rule).
//
//   minimize    c^T x
//   subject to  A_ub x <= b_ub,  A_eq x = b_eq,  lower <= x <= upper
//
// Bounds may be +/-infinity. Infeasible problems come back with a Farkas
// certificate over the rows and the finite bounds:
//
//   A_ub^T p + A_eq^T q - alpha + beta = 0,   p, alpha, beta >= 0,
//   b_ub^T p + b_eq^T q - lower^T alpha + upper^T beta < 0.

#include <cstddef>
#include <string_view>

#include "cqcert/numkit/dense.hpp"

namespace cqcert::numkit {

enum class LpStatus { Optimal, Infeasible, Unbounded };

std::string_view to_string(LpStatus s) noexcept;

struct LpProblem {
  Vector c;
  DenseMatrix a_ub;  // 0 rows allowed
  Vector b_ub;
  DenseMatrix a_eq;  // 0 rows allowed
  Vector b_eq;
  Vector lower;  // empty means all 0
  Vector upper;  // empty means all +inf
};

struct LpOptions {
  double feas_tol = 1e-9;
  double opt_tol = 1e-9;
  std::size_t max_iterations = 200000;
};

struct FarkasRay {
  Vector ub;     // p >= 0, one per inequality row
  Vector eq;     // q free, one per equality row
  Vector lower;  // alpha >= 0, zero where the lower bound is infinite
  Vector upper;  // beta >= 0, zero where the upper bound is infinite
  double value = 0.0;  // b^T ray, negative for a valid certificate
};

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Vector x;
  double objective = 0.0;
  // Row duals with reduced costs r = c - A_ub^T y_ub - A_eq^T y_eq.
  // At an optimum y_ub <= 0, r >= 0 at lower bounds and r <= 0 at upper bounds.
  Vector duals_ub;
  Vector duals_eq;
  Vector reduced_costs;
  FarkasRay farkas;  // filled when infeasible
  std::size_t iterations = 0;
};

/// Throws DimensionError on inconsistent sizes and NumericError when the
/// iteration limit is hit.
LpResult solve_lp(const LpProblem& problem, const LpOptions& options = {});

LpResult solve_lp(const Vector& c, const DenseMatrix& a_ub, const Vector& b_ub,
                  const DenseMatrix& a_eq, const Vector& b_eq, const Vector& lower,
                  const Vector& upper);

/// Residual of a Farkas certificate: max of |A^T ray| entries (the stationarity
/// part), the sign violations, and whether value < -threshold.
struct FarkasCheck {
  double stationarity = 0.0;
  double sign_violation = 0.0;
  double value = 0.0;
};
FarkasCheck check_farkas(const LpProblem& problem, const FarkasRay& ray);

}  // namespace cqcert::numkit
