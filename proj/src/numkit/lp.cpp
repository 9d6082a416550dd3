#include "cqcert/numkit/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "cqcert/error.hpp"

namespace cqcert::numkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-11;

enum class VarState : unsigned char { Lower, Upper, Basic };

// Internal column: contributes sign * y to original variable `var`.
struct ColumnMap {
  std::size_t var;
  double sign;
};

// Dense tableau over the internal standard form M y = rhs, 0 <= y <= upper.
// The last `rows` columns are artificials whose initial block is the
// identity, so that block of the tableau always holds B^{-1}.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), t_(rows * cols, 0.0) {}

  double& at(std::size_t i, std::size_t j) { return t_[i * n_ + j]; }
  double at(std::size_t i, std::size_t j) const { return t_[i * n_ + j]; }

  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }

  void pivot(std::size_t r, std::size_t j) {
    const double p = at(r, j);
    double* row_r = &t_[r * n_];
    for (std::size_t k = 0; k < n_; ++k) row_r[k] /= p;
    row_r[j] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row_i = &t_[i * n_];
      const double f = row_i[j];
      if (f == 0.0) continue;
      for (std::size_t k = 0; k < n_; ++k) row_i[k] -= f * row_r[k];
      row_i[j] = 0.0;
    }
  }

 private:
  std::size_t m_;
  std::size_t n_;
  std::vector<double> t_;
};

enum class PhaseOutcome { Optimal, Unbounded };

class BoundedSimplex {
 public:
  BoundedSimplex(Tableau tableau, std::vector<double> rhs, std::vector<double> upper,
                 std::size_t first_artificial, const LpOptions& options)
      : tab_(std::move(tableau)),
        original_(tab_),
        rhs_(std::move(rhs)),
        upper_(std::move(upper)),
        first_art_(first_artificial),
        options_(options),
        state_(tab_.cols(), VarState::Lower),
        basis_(tab_.rows()),
        beta_(rhs_) {}

  void set_basic(std::size_t row, std::size_t col) {
    basis_[row] = col;
    state_[col] = VarState::Basic;
  }

  PhaseOutcome run(const std::vector<double>& cost) {
    const std::size_t m = tab_.rows();
    const std::size_t n = tab_.cols();
    std::vector<double> cb(m);
    for (;;) {
      if (++iterations_ > options_.max_iterations)
        throw NumericError("simplex iteration limit reached");
      for (std::size_t i = 0; i < m; ++i) cb[i] = cost[basis_[i]];

      // Bland: the lowest-index improving column enters.
      std::size_t enter = n;
      double dir = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (state_[j] == VarState::Basic) continue;
        if (state_[j] == VarState::Lower && upper_[j] <= 0.0) continue;
        double d = cost[j];
        for (std::size_t i = 0; i < m; ++i) d -= cb[i] * tab_.at(i, j);
        if (state_[j] == VarState::Lower && d < -options_.opt_tol) {
          enter = j;
          dir = 1.0;
          break;
        }
        if (state_[j] == VarState::Upper && d > options_.opt_tol) {
          enter = j;
          dir = -1.0;
          break;
        }
      }
      if (enter == n) return PhaseOutcome::Optimal;

      double theta = upper_[enter];
      std::size_t leave = m;
      bool leave_to_upper = false;
      for (std::size_t i = 0; i < m; ++i) {
        const double a = dir * tab_.at(i, enter);
        double limit;
        bool to_upper;
        if (a > kPivotTol) {
          limit = beta_[i] / a;
          to_upper = false;
        } else if (a < -kPivotTol && std::isfinite(upper_[basis_[i]])) {
          limit = (upper_[basis_[i]] - beta_[i]) / (-a);
          to_upper = true;
        } else {
          continue;
        }
        limit = std::max(limit, 0.0);
        const double tie = 1e-12 * (1.0 + std::fabs(limit));
        const bool better = limit < theta - tie;
        const bool tied_lower_index =
            leave != m && std::fabs(limit - theta) <= tie && basis_[i] < basis_[leave];
        if (better || tied_lower_index) {
          theta = limit;
          leave = i;
          leave_to_upper = to_upper;
        }
      }
      if (!std::isfinite(theta)) return PhaseOutcome::Unbounded;

      for (std::size_t i = 0; i < m; ++i) beta_[i] -= theta * dir * tab_.at(i, enter);
      if (leave == m) {
        state_[enter] = state_[enter] == VarState::Lower ? VarState::Upper : VarState::Lower;
        continue;
      }
      const double entering_value = dir > 0.0 ? theta : upper_[enter] - theta;
      state_[basis_[leave]] = leave_to_upper ? VarState::Upper : VarState::Lower;
      tab_.pivot(leave, enter);
      beta_[leave] = entering_value;
      basis_[leave] = enter;
      state_[enter] = VarState::Basic;
    }
  }

  double value(std::size_t col) const {
    switch (state_[col]) {
      case VarState::Basic:
        for (std::size_t i = 0; i < basis_.size(); ++i)
          if (basis_[i] == col) return beta_[i];
        return 0.0;
      case VarState::Upper:
        return upper_[col];
      default:
        return 0.0;
    }
  }

  double artificial_sum() const {
    double w = 0.0;
    for (std::size_t i = 0; i < basis_.size(); ++i)
      if (basis_[i] >= first_art_) w += beta_[i];
    return w;
  }

  // Pivots basic artificials out where a structural column allows it, then
  // pins every artificial at zero.
  void drive_out_artificials() {
    const std::size_t m = tab_.rows();
    for (std::size_t r = 0; r < m; ++r) {
      if (basis_[r] < first_art_) continue;
      for (std::size_t j = 0; j < first_art_; ++j) {
        if (state_[j] == VarState::Basic || std::fabs(tab_.at(r, j)) <= 1e-9) continue;
        state_[basis_[r]] = VarState::Lower;
        tab_.pivot(r, j);
        basis_[r] = j;
        state_[j] = VarState::Basic;
        break;
      }
    }
    for (std::size_t j = first_art_; j < tab_.cols(); ++j) upper_[j] = 0.0;
    refresh_basic_values();
  }

  // beta = B^{-1} (rhs - sum_{j at upper} M_j u_j), B^{-1} read from the
  // artificial block.
  void refresh_basic_values() {
    const std::size_t m = tab_.rows();
    std::vector<double> adjusted = rhs_;
    for (std::size_t j = 0; j < tab_.cols(); ++j) {
      if (state_[j] != VarState::Upper) continue;
      for (std::size_t i = 0; i < m; ++i) adjusted[i] -= original_.at(i, j) * upper_[j];
    }
    for (std::size_t k = 0; k < m; ++k) {
      double v = 0.0;
      for (std::size_t i = 0; i < m; ++i) v += tab_.at(k, first_art_ + i) * adjusted[i];
      beta_[k] = v;
    }
  }

  // pi = c_B^T B^{-1}
  std::vector<double> row_duals(const std::vector<double>& cost) const {
    const std::size_t m = tab_.rows();
    std::vector<double> pi(m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
      const double ck = cost[basis_[k]];
      if (ck == 0.0) continue;
      for (std::size_t i = 0; i < m; ++i) pi[i] += ck * tab_.at(k, first_art_ + i);
    }
    return pi;
  }

  std::size_t iterations() const { return iterations_; }

 private:
  Tableau tab_;
  Tableau original_;
  std::vector<double> rhs_;
  std::vector<double> upper_;
  std::size_t first_art_;
  LpOptions options_;
  std::vector<VarState> state_;
  std::vector<std::size_t> basis_;
  std::vector<double> beta_;
  std::size_t iterations_ = 0;
};

void validate(const LpProblem& p, std::size_t n) {
  auto bad = [](const std::string& what) { throw DimensionError("solve_lp: " + what); };
  if (p.a_ub.rows() != p.b_ub.size()) bad("A_ub rows differ from b_ub length");
  if (p.a_ub.rows() > 0 && p.a_ub.cols() != n) bad("A_ub columns differ from c length");
  if (p.a_eq.rows() != p.b_eq.size()) bad("A_eq rows differ from b_eq length");
  if (p.a_eq.rows() > 0 && p.a_eq.cols() != n) bad("A_eq columns differ from c length");
  if (!p.lower.empty() && p.lower.size() != n) bad("lower bound length mismatch");
  if (!p.upper.empty() && p.upper.size() != n) bad("upper bound length mismatch");
  for (double v : p.c)
    if (!std::isfinite(v)) bad("objective coefficient not finite");
  for (double v : p.b_ub)
    if (!std::isfinite(v)) bad("b_ub entry not finite");
  for (double v : p.b_eq)
    if (!std::isfinite(v)) bad("b_eq entry not finite");
}

FarkasRay farkas_from_auxiliary(const LpProblem& p, const Vector& lower, const Vector& upper,
                                const LpOptions& options);

LpResult solve_impl(const LpProblem& p, const LpOptions& options, bool want_farkas) {
  const std::size_t n = p.c.size();
  validate(p, n);
  const Vector lower = p.lower.empty() ? Vector(n, 0.0) : p.lower;
  const Vector upper = p.upper.empty() ? Vector(n, kInf) : p.upper;
  const std::size_t m_ub = p.b_ub.size();
  const std::size_t m_eq = p.b_eq.size();
  const std::size_t m = m_ub + m_eq;

  LpResult result;
  result.duals_ub.assign(m_ub, 0.0);
  result.duals_eq.assign(m_eq, 0.0);

  for (std::size_t j = 0; j < n; ++j) {
    if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] == kInf || upper[j] == -kInf)
      throw DimensionError("solve_lp: invalid bound for variable " + std::to_string(j));
    if (lower[j] > upper[j]) {
      result.status = LpStatus::Infeasible;
      result.farkas.ub.assign(m_ub, 0.0);
      result.farkas.eq.assign(m_eq, 0.0);
      result.farkas.lower.assign(n, 0.0);
      result.farkas.upper.assign(n, 0.0);
      result.farkas.lower[j] = 1.0;
      result.farkas.upper[j] = 1.0;
      result.farkas.value = upper[j] - lower[j];
      return result;
    }
  }

  // Shift/reflect/split the original variables to y >= 0.
  std::vector<ColumnMap> columns;
  Vector offset(n, 0.0);
  Vector col_upper;
  for (std::size_t j = 0; j < n; ++j) {
    const bool lo = std::isfinite(lower[j]);
    const bool hi = std::isfinite(upper[j]);
    if (lo) {
      offset[j] = lower[j];
      columns.push_back({j, 1.0});
      col_upper.push_back(hi ? upper[j] - lower[j] : kInf);
    } else if (hi) {
      offset[j] = upper[j];
      columns.push_back({j, -1.0});
      col_upper.push_back(kInf);
    } else {
      columns.push_back({j, 1.0});
      col_upper.push_back(kInf);
      columns.push_back({j, -1.0});
      col_upper.push_back(kInf);
    }
  }
  const std::size_t k_struct = columns.size();
  const std::size_t first_slack = k_struct;
  const std::size_t first_art = k_struct + m_ub;
  const std::size_t total = first_art + m;

  auto coeff = [&](std::size_t row, std::size_t var) {
    return row < m_ub ? p.a_ub(row, var) : p.a_eq(row - m_ub, var);
  };

  Tableau tab(m, total);
  Vector rhs(m);
  Vector row_sign(m, 1.0);
  for (std::size_t i = 0; i < m; ++i) {
    double b = i < m_ub ? p.b_ub[i] : p.b_eq[i - m_ub];
    for (std::size_t j = 0; j < n; ++j) b -= coeff(i, j) * offset[j];
    row_sign[i] = b < 0.0 ? -1.0 : 1.0;
    rhs[i] = row_sign[i] * b;
    for (std::size_t k = 0; k < k_struct; ++k)
      tab.at(i, k) = row_sign[i] * coeff(i, columns[k].var) * columns[k].sign;
    if (i < m_ub) tab.at(i, first_slack + i) = row_sign[i];
    tab.at(i, first_art + i) = 1.0;
  }

  Vector upper_all(total, kInf);
  std::copy(col_upper.begin(), col_upper.end(), upper_all.begin());

  BoundedSimplex simplex(tab, rhs, upper_all, first_art, options);
  Vector phase1_cost(total, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (i < m_ub && row_sign[i] > 0.0) {
      simplex.set_basic(i, first_slack + i);
    } else {
      simplex.set_basic(i, first_art + i);
      phase1_cost[first_art + i] = 1.0;
    }
  }
  // Artificials that start nonbasic can never help phase I.
  // (Their upper bound is zeroed in drive_out_artificials.)
  simplex.run(phase1_cost);
  simplex.refresh_basic_values();

  double rhs_scale = 1.0;
  for (double v : rhs) rhs_scale = std::max(rhs_scale, std::fabs(v));
  if (simplex.artificial_sum() > options.feas_tol * rhs_scale) {
    result.status = LpStatus::Infeasible;
    result.iterations = simplex.iterations();
    if (want_farkas) result.farkas = farkas_from_auxiliary(p, lower, upper, options);
    return result;
  }
  simplex.drive_out_artificials();

  Vector cost(total, 0.0);
  for (std::size_t k = 0; k < k_struct; ++k) cost[k] = p.c[columns[k].var] * columns[k].sign;
  const PhaseOutcome outcome = simplex.run(cost);
  simplex.refresh_basic_values();
  result.iterations = simplex.iterations();

  result.x = offset;
  for (std::size_t k = 0; k < k_struct; ++k)
    result.x[columns[k].var] += columns[k].sign * simplex.value(k);
  for (std::size_t j = 0; j < n; ++j)
    result.x[j] = std::clamp(result.x[j], lower[j], upper[j]);
  result.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) result.objective += p.c[j] * result.x[j];

  if (outcome == PhaseOutcome::Unbounded) {
    result.status = LpStatus::Unbounded;
    return result;
  }
  result.status = LpStatus::Optimal;

  const Vector pi = simplex.row_duals(cost);
  for (std::size_t i = 0; i < m; ++i) {
    const double y = row_sign[i] * pi[i];
    if (i < m_ub) {
      result.duals_ub[i] = y;
    } else {
      result.duals_eq[i - m_ub] = y;
    }
  }
  result.reduced_costs = p.c;
  for (std::size_t i = 0; i < m_ub; ++i)
    for (std::size_t j = 0; j < n; ++j) result.reduced_costs[j] -= result.duals_ub[i] * p.a_ub(i, j);
  for (std::size_t i = 0; i < m_eq; ++i)
    for (std::size_t j = 0; j < n; ++j) result.reduced_costs[j] -= result.duals_eq[i] * p.a_eq(i, j);
  return result;
}

// The alternative system, normalized by box bounds so that it is bounded:
//   min b_ub.p + b_eq.q - l.alpha + u.beta
//   s.t. A_ub^T p + A_eq^T q - alpha + beta = 0,
//        0 <= p, alpha, beta <= 1, -1 <= q <= 1.
FarkasRay farkas_from_auxiliary(const LpProblem& p, const Vector& lower, const Vector& upper,
                                const LpOptions& options) {
  const std::size_t n = p.c.size();
  const std::size_t m_ub = p.b_ub.size();
  const std::size_t m_eq = p.b_eq.size();
  const std::size_t vars = m_ub + m_eq + 2 * n;
  LpProblem aux;
  aux.c.assign(vars, 0.0);
  aux.lower.assign(vars, 0.0);
  aux.upper.assign(vars, 1.0);
  for (std::size_t i = 0; i < m_ub; ++i) aux.c[i] = p.b_ub[i];
  for (std::size_t k = 0; k < m_eq; ++k) {
    aux.c[m_ub + k] = p.b_eq[k];
    aux.lower[m_ub + k] = -1.0;
  }
  const std::size_t a0 = m_ub + m_eq;
  const std::size_t b0 = a0 + n;
  for (std::size_t j = 0; j < n; ++j) {
    if (std::isfinite(lower[j])) {
      aux.c[a0 + j] = -lower[j];
    } else {
      aux.upper[a0 + j] = 0.0;
    }
    if (std::isfinite(upper[j])) {
      aux.c[b0 + j] = upper[j];
    } else {
      aux.upper[b0 + j] = 0.0;
    }
  }
  aux.a_eq = DenseMatrix(n, vars);
  aux.b_eq.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m_ub; ++i) aux.a_eq(j, i) = p.a_ub(i, j);
    for (std::size_t k = 0; k < m_eq; ++k) aux.a_eq(j, m_ub + k) = p.a_eq(k, j);
    aux.a_eq(j, a0 + j) = -1.0;
    aux.a_eq(j, b0 + j) = 1.0;
  }
  aux.a_ub = DenseMatrix(0, vars);
  const LpResult r = solve_impl(aux, options, false);
  FarkasRay ray;
  if (r.status != LpStatus::Optimal) return ray;
  ray.ub.assign(r.x.begin(), r.x.begin() + static_cast<std::ptrdiff_t>(m_ub));
  ray.eq.assign(r.x.begin() + static_cast<std::ptrdiff_t>(m_ub),
                r.x.begin() + static_cast<std::ptrdiff_t>(a0));
  ray.lower.assign(r.x.begin() + static_cast<std::ptrdiff_t>(a0),
                   r.x.begin() + static_cast<std::ptrdiff_t>(b0));
  ray.upper.assign(r.x.begin() + static_cast<std::ptrdiff_t>(b0), r.x.end());
  ray.value = r.objective;
  return ray;
}

}  // namespace

std::string_view to_string(LpStatus s) noexcept {
  switch (s) {
    case LpStatus::Optimal:
      return "optimal";
    case LpStatus::Infeasible:
      return "infeasible";
    case LpStatus::Unbounded:
      return "unbounded";
  }
  return "unknown";
}

LpResult solve_lp(const LpProblem& problem, const LpOptions& options) {
  return solve_impl(problem, options, true);
}

LpResult solve_lp(const Vector& c, const DenseMatrix& a_ub, const Vector& b_ub,
                  const DenseMatrix& a_eq, const Vector& b_eq, const Vector& lower,
                  const Vector& upper) {
  return solve_lp(LpProblem{c, a_ub, b_ub, a_eq, b_eq, lower, upper});
}

FarkasCheck check_farkas(const LpProblem& p, const FarkasRay& ray) {
  const std::size_t n = p.c.size();
  const Vector lower = p.lower.empty() ? Vector(n, 0.0) : p.lower;
  const Vector upper = p.upper.empty() ? Vector(n, kInf) : p.upper;
  FarkasCheck check;
  if (ray.ub.size() != p.b_ub.size() || ray.eq.size() != p.b_eq.size() ||
      ray.lower.size() != n || ray.upper.size() != n) {
    check.stationarity = kInf;
    check.value = kInf;
    return check;
  }
  Vector s(n, 0.0);
  for (std::size_t i = 0; i < p.b_ub.size(); ++i) {
    check.sign_violation = std::max(check.sign_violation, -ray.ub[i]);
    check.value += p.b_ub[i] * ray.ub[i];
    for (std::size_t j = 0; j < n; ++j) s[j] += p.a_ub(i, j) * ray.ub[i];
  }
  for (std::size_t k = 0; k < p.b_eq.size(); ++k) {
    check.value += p.b_eq[k] * ray.eq[k];
    for (std::size_t j = 0; j < n; ++j) s[j] += p.a_eq(k, j) * ray.eq[k];
  }
  for (std::size_t j = 0; j < n; ++j) {
    s[j] += ray.upper[j] - ray.lower[j];
    check.sign_violation = std::max({check.sign_violation, -ray.lower[j], -ray.upper[j]});
    if (ray.lower[j] != 0.0) {
      if (!std::isfinite(lower[j])) check.sign_violation = kInf;
      else check.value -= lower[j] * ray.lower[j];
    }
    if (ray.upper[j] != 0.0) {
      if (!std::isfinite(upper[j])) check.sign_violation = kInf;
      else check.value += upper[j] * ray.upper[j];
    }
    check.stationarity = std::max(check.stationarity, std::fabs(s[j]));
  }
  return check;
}

}  // namespace cqcert::numkit
