#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "cqcert/model/problem_file.hpp"
#include "cqcert/numkit/dense.hpp"

namespace cqcert::model {

/// Active-set threshold at eps = 0: g_t >= -kActiveTol counts as active.
inline constexpr double kActiveTol = 1e-10;
/// Jacobians whose finite-difference discrepancy exceeds this are unreliable.
inline constexpr double kFdReliability = 1e-6;

struct GValues {
  numkit::Vector h;        // H(x)
  numkit::Vector g;        // g_t(x) over the sampled index set
  double k_violation = 0;  // max(||H||_inf, max_t g_t, 0)
};

struct FdJacobian {
  numkit::Vector grad_f;
  numkit::DenseMatrix j_h;     // m x n
  numkit::DenseMatrix g_rows;  // |T| x n
};

struct JacobianBundle {
  numkit::Vector x;
  numkit::Vector grad_f;
  numkit::DenseMatrix j_h;     // m x n
  numkit::DenseMatrix g_rows;  // |T| x n, row k is Dg_{t_k}
  numkit::Vector t_values;
  numkit::Vector g_values;     // g_t(x)
  numkit::Vector h_values;     // H(x)
  double fd_discrepancy = 0.0;
  bool reliable = true;
};

struct IndexSubset {
  double eps = 0.0;
  std::vector<std::size_t> members;  // positions in the sampled index set
  numkit::Vector t;
  numkit::Vector g;
};

/// Positions k with g[k] >= -max(eps, kActiveTol); nested in eps by
/// construction.
std::vector<std::size_t> active_positions(const numkit::Vector& g, double eps);

/// |a - b| / max(1, |a|, |b|).
double relative_discrepancy(double a, double b);

/// A validated problem with its derivatives prepared. Immutable; all member
/// functions are safe to call concurrently.
class Problem {
 public:
  explicit Problem(ProblemSpec spec);

  const ProblemSpec& spec() const noexcept { return spec_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(spec_.n); }
  std::size_t n_equalities() const noexcept { return spec_.equalities.size(); }
  /// Size of the sampled index set (0 without inequalities).
  std::size_t n_indices() const noexcept { return t_values_.size(); }
  const numkit::Vector& t_values() const noexcept { return t_values_; }
  const numkit::Vector& point() const noexcept { return spec_.point; }
  bool has_inequalities() const noexcept { return !t_values_.empty(); }

  /// Same constraints and point, different objective.
  Problem with_objective(std::string_view text) const;

  double objective(const numkit::Vector& x) const;
  numkit::Vector equalities(const numkit::Vector& x) const;
  numkit::Vector inequalities(const numkit::Vector& x) const;

  GValues eval_G(const numkit::Vector& x) const;

  /// Analytic DH(x) only.
  numkit::DenseMatrix jacobian_h(const numkit::Vector& x) const;

  /// Analytic Jacobians with a central-difference cross-check at step
  /// 1e-6 * (1 + ||x||_inf).
  JacobianBundle jacobians_at(const numkit::Vector& x) const;

  FdJacobian fd_jacobian(const numkit::Vector& x, double h) const;

  IndexSubset eps_active_set(const numkit::Vector& x, double eps) const;

 private:
  double eval_ineq(std::size_t k, const numkit::Vector& x) const;
  double eval_ineq_grad(std::size_t k, std::size_t i, const numkit::Vector& x) const;
  void check_point(const numkit::Vector& x) const;

  ProblemSpec spec_;
  numkit::Vector t_values_;
  std::vector<expr::Expr> grad_f_;
  std::vector<std::vector<expr::Expr>> grad_h_;    // [i][j] = dH_i/dx_j
  std::vector<expr::Expr> grad_family_;            // Parametric
  std::vector<std::vector<expr::Expr>> grad_list_;  // List
};

}  // namespace cqcert::model
