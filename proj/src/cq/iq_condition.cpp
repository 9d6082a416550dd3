#include <algorithm>
#include <cmath>
#include <limits>

#include "cqcert/cq/cq.hpp"
#include "cqcert/error.hpp"
#include "cqcert/kernels.hpp"
#include "cqcert/numkit/lp.hpp"
#include "cqcert/rng.hpp"

namespace cqcert::cq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSameRow = 1e-12;

// E1^T d = 0 as equality rows over (d, s).
void kernel_rows(const SpaceSplit& split, std::size_t extra, numkit::LpProblem& lp) {
  const std::size_t n = split.n;
  const std::size_t r = split.e1.cols();
  lp.a_eq = numkit::DenseMatrix(r, n + extra);
  lp.b_eq.assign(r, 0.0);
  for (std::size_t k = 0; k < r; ++k)
    for (std::size_t i = 0; i < n; ++i) lp.a_eq(k, i) = split.e1(i, k);
}

std::vector<std::size_t> representatives(const numkit::DenseMatrix& g_rows,
                                         const std::vector<std::size_t>& rows) {
  std::vector<std::size_t> out;
  for (const auto& group : numkit::group_equal_rows(g_rows, rows, kSameRow))
    out.push_back(group.front());
  return out;
}

double max_over(const numkit::Vector& values, const std::vector<std::size_t>& rows) {
  numkit::Vector picked;
  picked.reserve(rows.size());
  for (std::size_t k : rows) picked.push_back(values[k]);
  return kernels::max_element(picked);
}

}  // namespace

IqAttempt strict_margin(const numkit::DenseMatrix& g_rows, const std::vector<std::size_t>& rows,
                        const SpaceSplit& split, double lp_tol, numkit::Vector* direction) {
  IqAttempt a;
  a.active = rows.size();
  if (rows.empty()) {
    a.lp_status = "empty";
    a.margin = -kInf;
    if (direction != nullptr) direction->assign(split.n, 0.0);
    return a;
  }
  const std::size_t n = split.n;
  const std::vector<std::size_t> reps = representatives(g_rows, rows);
  numkit::LpProblem lp;
  lp.c.assign(n + 1, 0.0);
  lp.c[n] = -1.0;
  lp.a_ub = numkit::DenseMatrix(reps.size(), n + 1);
  lp.b_ub.assign(reps.size(), 0.0);
  for (std::size_t k = 0; k < reps.size(); ++k) {
    for (std::size_t i = 0; i < n; ++i) lp.a_ub(k, i) = g_rows(reps[k], i);
    lp.a_ub(k, n) = 1.0;
  }
  kernel_rows(split, 1, lp);
  lp.lower.assign(n + 1, -1.0);
  lp.upper.assign(n + 1, 1.0);
  lp.lower[n] = -kInf;
  lp.upper[n] = kInf;
  const numkit::LpResult res = numkit::solve_lp(lp, {lp_tol, lp_tol, 200000});
  a.lp_status = std::string(numkit::to_string(res.status));
  if (res.status == numkit::LpStatus::Optimal) {
    a.margin = -res.x[n];
    if (direction != nullptr) direction->assign(res.x.begin(), res.x.begin() + static_cast<std::ptrdiff_t>(n));
  } else {
    a.margin = kInf;
    if (direction != nullptr) direction->clear();
  }
  return a;
}

IqEvidence find_iq_direction(const model::JacobianBundle& bundle, const SpaceSplit& split,
                             const std::vector<double>& eps_grid, double lp_tol, double margin_tol) {
  if (eps_grid.empty()) throw std::invalid_argument("find_iq_direction: empty eps grid");
  IqEvidence ev;
  bool lp_trouble = false;
  std::vector<numkit::Vector> directions;
  for (double eps : eps_grid) {
    numkit::Vector d;
    ev.attempts.push_back(
        strict_margin(bundle.g_rows, model::active_positions(bundle.g_values, eps), split, lp_tol, &d));
    ev.attempts.back().eps = eps;
    directions.push_back(std::move(d));
    const std::string& status = ev.attempts.back().lp_status;
    lp_trouble = lp_trouble || (status != "optimal" && status != "empty");
  }

  std::size_t chosen = eps_grid.size();
  for (std::size_t k = 0; k < eps_grid.size(); ++k) {
    const IqAttempt& a = ev.attempts[k];
    if (a.lp_status == "empty" || (a.lp_status == "optimal" && -a.margin > margin_tol)) {
      chosen = k;
      break;
    }
  }

  if (chosen == eps_grid.size()) {
    const std::size_t last = eps_grid.size() - 1;
    ev.verdict = lp_trouble ? Verdict::Inconclusive : Verdict::Fails;
    ev.direction = directions[last];
    ev.margin = ev.attempts[last].margin;
    ev.eps_used = eps_grid[last];
    ev.lp_status = ev.attempts[last].lp_status;
    return ev;
  }

  const IqAttempt& a = ev.attempts[chosen];
  ev.eps_used = eps_grid[chosen];
  ev.lp_status = a.lp_status;
  ev.margin = a.margin;
  ev.direction = directions[chosen];
  ev.vacuous = a.lp_status == "empty";
  ev.verdict = Verdict::Holds;
  if (!ev.vacuous) {
    // Independent recomputation from the bundle.
    const numkit::Vector dh = bundle.j_h.apply(ev.direction);
    const numkit::Vector dg = bundle.g_rows.apply(ev.direction);
    const double worst = max_over(dg, model::active_positions(bundle.g_values, ev.eps_used));
    if (kernels::max_abs(dh) > 1e-9 || worst > ev.margin + 1e-9) {
      ev.verdict = Verdict::Inconclusive;
      ev.lp_status = "verification failed";
    }
  }
  return ev;
}

double h_value(const model::JacobianBundle& bundle, const numkit::Vector& d,
               const std::vector<double>& eps_grid) {
  if (eps_grid.empty()) throw std::invalid_argument("h_value: empty eps grid");
  if (d.size() != bundle.g_rows.cols() && bundle.g_rows.rows() > 0)
    throw DimensionError("h_value: direction length mismatch");
  if (bundle.g_rows.rows() == 0) return -kInf;
  const numkit::Vector dg = bundle.g_rows.apply(d);
  double h = kInf;
  for (double eps : eps_grid) h = std::min(h, max_over(dg, model::active_positions(bundle.g_values, eps)));
  return h;
}

ConeMembership linearized_cone_contains(const model::JacobianBundle& bundle, const numkit::Vector& d,
                                        double tol, const std::vector<double>& eps_grid) {
  ConeMembership out;
  if (d.size() != bundle.x.size()) throw DimensionError("linearized cone: direction length mismatch");
  const bool eq_ok = bundle.j_h.rows() == 0 || kernels::max_abs(bundle.j_h.apply(d)) <= tol;
  bool ineq_ok = true;
  if (bundle.g_rows.rows() > 0) {
    const numkit::Vector dg = bundle.g_rows.apply(d);
    ineq_ok = max_over(dg, model::active_positions(bundle.g_values, tol)) <= tol;
  }
  out.member = eq_ok && ineq_ok;
  out.h = h_value(bundle, d, eps_grid);
  out.strict = out.member && out.h < -tol;
  return out;
}

AffEvidence check_aff_assumption(const model::JacobianBundle& bundle, const SpaceSplit& split,
                                 std::size_t n_probe, double lp_tol, double margin_tol,
                                 std::uint64_t seed) {
  AffEvidence ev;
  const std::vector<std::size_t> active = model::active_positions(bundle.g_values, 0.0);
  ev.active = active.size();
  if (active.empty()) {
    ev.verdict = Verdict::Holds;
    ev.exact_margin = -kInf;
    ev.reason = "no active constraints; the linearized cone is ker DH";
    return ev;
  }
  if (split.e2.cols() == 0) {
    ev.verdict = Verdict::Holds;
    ev.reason = "ker DH = {0}";
    return ev;
  }
  const IqAttempt exact = strict_margin(bundle.g_rows, active, split, lp_tol, nullptr);
  ev.exact_margin = exact.margin;
  if (exact.lp_status == "optimal" && -exact.margin > margin_tol) {
    ev.verdict = Verdict::Holds;
    ev.reason = "a direction in ker DH is strictly feasible for every active constraint";
    return ev;
  }

  const std::size_t n = split.n;
  const std::size_t k = split.e2.cols();
  const std::vector<std::size_t> reps = representatives(bundle.g_rows, active);

  // Gradients that vanish on ker DH: zero against random kernel directions.
  Rng rng(seed, Stream::AffProbes);
  std::vector<bool> vanishes(reps.size(), true);
  for (std::size_t p = 0; p < n_probe; ++p) {
    numkit::Vector z(k);
    for (double& v : z) v = rng.normal();
    numkit::Vector d = split.e2.apply(z);
    const double nd = numkit::norm2(d);
    if (nd == 0.0) continue;
    for (double& v : d) v /= nd;
    for (std::size_t r = 0; r < reps.size(); ++r) {
      const auto row = bundle.g_rows.row(reps[r]);
      const double scale = std::max(1.0, numkit::norm2(row));
      if (std::fabs(kernels::dot(row, d)) > 1e-9 * scale) vanishes[r] = false;
    }
  }
  if (n_probe > 0) {
    for (std::size_t r = 0; r < reps.size(); ++r)
      if (vanishes[r]) ev.implicit_equalities.push_back(bundle.t_values[reps[r]]);
    if (!ev.implicit_equalities.empty()) {
      ev.verdict = Verdict::Fails;
      ev.reason = "an active gradient vanishes on ker DH";
      return ev;
    }
  }

  // Implicit equalities of the finite system: max -<a_r, d> over the cone.
  constexpr std::size_t kMaxRowLps = 64;
  if (reps.size() > kMaxRowLps) {
    ev.verdict = Verdict::Inconclusive;
    ev.reason = "no strict direction found and too many distinct active gradients to classify";
    return ev;
  }
  for (std::size_t r = 0; r < reps.size(); ++r) {
    numkit::LpProblem lp;
    lp.c.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) lp.c[i] = bundle.g_rows(reps[r], i);
    lp.a_ub = numkit::DenseMatrix(reps.size(), n);
    lp.b_ub.assign(reps.size(), 0.0);
    for (std::size_t q = 0; q < reps.size(); ++q)
      for (std::size_t i = 0; i < n; ++i) lp.a_ub(q, i) = bundle.g_rows(reps[q], i);
    kernel_rows(split, 0, lp);
    lp.lower.assign(n, -1.0);
    lp.upper.assign(n, 1.0);
    const numkit::LpResult res = numkit::solve_lp(lp, {lp_tol, lp_tol, 200000});
    if (res.status != numkit::LpStatus::Optimal) {
      ev.verdict = Verdict::Inconclusive;
      ev.reason = "LP " + std::string(numkit::to_string(res.status)) + " while classifying active rows";
      return ev;
    }
    if (-res.objective <= margin_tol) ev.implicit_equalities.push_back(bundle.t_values[reps[r]]);
  }
  if (!ev.implicit_equalities.empty()) {
    ev.verdict = Verdict::Fails;
    ev.reason = "an active constraint holds with equality on the whole linearized cone";
    return ev;
  }
  ev.verdict = Verdict::Inconclusive;
  ev.reason = "no strict direction found, but no implicit equality detected";
  return ev;
}

}  // namespace cqcert::cq
