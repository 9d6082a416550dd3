#include "cqcert/model/problem.hpp"

#include <cmath>
#include <string>

#include "cqcert/error.hpp"

namespace cqcert::model {

Problem::Problem(ProblemSpec spec) : spec_(std::move(spec)) {
  if (spec_.n < 1) throw DimensionError("problem dimension must be positive");
  if (spec_.point.size() != dim())
    throw DimensionError("point has " + std::to_string(spec_.point.size()) +
                         " entries, expected " + std::to_string(spec_.n));
  for (double v : spec_.point)
    if (!std::isfinite(v)) throw DimensionError("point entries must be finite");
  const int n = spec_.n;
  auto check_vars = [n](const expr::Expr& e, bool allow_t, const char* what) {
    if (e.max_x_index() > n)
      throw DimensionError(std::string(what) + " references x" + std::to_string(e.max_x_index()) +
                           " beyond dim " + std::to_string(n));
    if (!allow_t && e.uses_param())
      throw DimensionError(std::string(what) + " may not use the index parameter t");
  };
  check_vars(spec_.objective, false, "objective");
  for (const auto& h : spec_.equalities) check_vars(h, false, "equality");

  switch (spec_.family_kind) {
    case FamilyKind::None:
      break;
    case FamilyKind::Parametric:
      check_vars(spec_.family, true, "inequality");
      t_values_ = spec_.index_set.grid();
      break;
    case FamilyKind::List:
      for (const auto& g : spec_.inequality_list) check_vars(g, false, "inequality_list entry");
      if (spec_.index_set.kind != IndexKind::Finite ||
          spec_.index_set.values.size() != spec_.inequality_list.size())
        throw DimensionError("inequality_list needs a finite index set with one value per entry");
      t_values_ = spec_.index_set.grid();
      break;
  }

  for (int j = 1; j <= n; ++j) grad_f_.push_back(expr::diff(spec_.objective, j));
  for (const auto& h : spec_.equalities) {
    auto& row = grad_h_.emplace_back();
    for (int j = 1; j <= n; ++j) row.push_back(expr::diff(h, j));
  }
  if (spec_.family_kind == FamilyKind::Parametric)
    for (int j = 1; j <= n; ++j) grad_family_.push_back(expr::diff(spec_.family, j));
  for (const auto& g : spec_.inequality_list) {
    auto& row = grad_list_.emplace_back();
    for (int j = 1; j <= n; ++j) row.push_back(expr::diff(g, j));
  }
}

Problem Problem::with_objective(std::string_view text) const {
  ProblemSpec copy = spec_;
  copy.objective = expr::parse(text, spec_.n);
  if (copy.objective.uses_param()) throw ParseError("objective may not use the index parameter t", 0);
  copy.objective_text = std::string(text);
  return Problem(std::move(copy));
}

void Problem::check_point(const numkit::Vector& x) const {
  if (x.size() != dim())
    throw DimensionError("point has " + std::to_string(x.size()) + " entries, expected " +
                         std::to_string(spec_.n));
}

double Problem::eval_ineq(std::size_t k, const numkit::Vector& x) const {
  if (spec_.family_kind == FamilyKind::Parametric)
    return expr::eval(spec_.family, {x, t_values_[k]});
  return expr::eval(spec_.inequality_list[k], {x, std::nullopt});
}

double Problem::eval_ineq_grad(std::size_t k, std::size_t i, const numkit::Vector& x) const {
  if (spec_.family_kind == FamilyKind::Parametric)
    return expr::eval(grad_family_[i], {x, t_values_[k]});
  return expr::eval(grad_list_[k][i], {x, std::nullopt});
}

double Problem::objective(const numkit::Vector& x) const {
  check_point(x);
  return expr::eval(spec_.objective, {x, std::nullopt});
}

numkit::Vector Problem::equalities(const numkit::Vector& x) const {
  check_point(x);
  numkit::Vector out;
  out.reserve(n_equalities());
  for (const auto& h : spec_.equalities) out.push_back(expr::eval(h, {x, std::nullopt}));
  return out;
}

numkit::Vector Problem::inequalities(const numkit::Vector& x) const {
  check_point(x);
  numkit::Vector out(n_indices());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = eval_ineq(k, x);
  return out;
}

numkit::DenseMatrix Problem::jacobian_h(const numkit::Vector& x) const {
  check_point(x);
  numkit::DenseMatrix j(n_equalities(), dim());
  for (std::size_t i = 0; i < n_equalities(); ++i)
    for (std::size_t c = 0; c < dim(); ++c) j(i, c) = expr::eval(grad_h_[i][c], {x, std::nullopt});
  return j;
}

JacobianBundle Problem::jacobians_at(const numkit::Vector& x) const {
  check_point(x);
  JacobianBundle b;
  b.x = x;
  b.t_values = t_values_;
  b.grad_f.resize(dim());
  for (std::size_t c = 0; c < dim(); ++c) b.grad_f[c] = expr::eval(grad_f_[c], {x, std::nullopt});
  b.j_h = jacobian_h(x);
  b.g_rows = numkit::DenseMatrix(n_indices(), dim());
  for (std::size_t k = 0; k < n_indices(); ++k)
    for (std::size_t c = 0; c < dim(); ++c) b.g_rows(k, c) = eval_ineq_grad(k, c, x);
  b.g_values = inequalities(x);
  b.h_values = equalities(x);

  double h = 0.0;
  for (double v : x) h = std::max(h, std::fabs(v));
  h = 1e-6 * (1.0 + h);
  try {
    const FdJacobian fd = fd_jacobian(x, h);
    double worst = 0.0;
    for (std::size_t c = 0; c < dim(); ++c)
      worst = std::max(worst, relative_discrepancy(b.grad_f[c], fd.grad_f[c]));
    for (std::size_t i = 0; i < b.j_h.entries().size(); ++i)
      worst = std::max(worst, relative_discrepancy(b.j_h.entries()[i], fd.j_h.entries()[i]));
    for (std::size_t i = 0; i < b.g_rows.entries().size(); ++i)
      worst = std::max(worst, relative_discrepancy(b.g_rows.entries()[i], fd.g_rows.entries()[i]));
    b.fd_discrepancy = worst;
  } catch (const DomainError&) {
    b.fd_discrepancy = std::numeric_limits<double>::infinity();
  }
  b.reliable = b.fd_discrepancy <= kFdReliability;
  return b;
}

FdJacobian Problem::fd_jacobian(const numkit::Vector& x, double h) const {
  check_point(x);
  if (!(h > 0.0)) throw std::invalid_argument("fd_jacobian: step must be positive");
  FdJacobian fd;
  fd.grad_f.resize(dim());
  fd.j_h = numkit::DenseMatrix(n_equalities(), dim());
  fd.g_rows = numkit::DenseMatrix(n_indices(), dim());
  numkit::Vector xp = x;
  numkit::Vector xm = x;
  const double inv = 1.0 / (2.0 * h);
  for (std::size_t c = 0; c < dim(); ++c) {
    xp[c] = x[c] + h;
    xm[c] = x[c] - h;
    fd.grad_f[c] = (objective(xp) - objective(xm)) * inv;
    const numkit::Vector hp = equalities(xp);
    const numkit::Vector hm = equalities(xm);
    for (std::size_t i = 0; i < hp.size(); ++i) fd.j_h(i, c) = (hp[i] - hm[i]) * inv;
    for (std::size_t k = 0; k < n_indices(); ++k)
      fd.g_rows(k, c) = (eval_ineq(k, xp) - eval_ineq(k, xm)) * inv;
    xp[c] = x[c];
    xm[c] = x[c];
  }
  return fd;
}

}  // namespace cqcert::model
