#include <algorithm>
#include <cmath>
#include <limits>

#include "cqcert/cq/cq.hpp"
#include "cqcert/kernels.hpp"
#include "cqcert/numkit/lp.hpp"

namespace cqcert::cq {

NfmcqEvidence check_nfmcq(const model::Problem& problem, const model::JacobianBundle& bundle,
                          double lp_tol) {
  NfmcqEvidence ev;
  const std::size_t count = bundle.g_rows.rows();
  ev.generators = count;
  if (count == 0) {
    ev.verdict = Verdict::Holds;
    ev.reason = "no inequality constraints";
    return ev;
  }
  if (problem.spec().index_set.kind == model::IndexKind::Finite) {
    ev.verdict = Verdict::Holds;
    ev.reason = "finite index set; a finitely generated cone is closed";
    return ev;
  }

  // Lifted generators v_t = (Dg_t, <Dg_t, x> - g_t).
  const std::size_t n = bundle.g_rows.cols();
  numkit::DenseMatrix lifted(count, n + 1);
  double scale = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const auto row = bundle.g_rows.row(k);
    std::copy(row.begin(), row.end(), lifted.row(k).begin());
    lifted(k, n) = kernels::dot(row, bundle.x) - bundle.g_values[k];
    scale = std::max(scale, numkit::norm2(lifted.row(k)));
  }

  auto step = [&](std::size_t a, std::size_t b) {
    double s = 0.0;
    for (std::size_t c = 0; c <= n; ++c) s += (lifted(a, c) - lifted(b, c)) * (lifted(a, c) - lifted(b, c));
    return std::sqrt(s);
  };
  if (count < 3) {
    ev.reason = "grid too coarse to check continuity of the generators";
    return ev;
  }
  for (std::size_t k = 0; k + 1 < count; ++k) ev.modulus = std::max(ev.modulus, step(k, k + 1));
  for (std::size_t k = 0; k + 2 < count; ++k) ev.coarse_modulus = std::max(ev.coarse_modulus, step(k, k + 2));
  // Continuous generators roughly halve their modulus when the spacing
  // halves; a jump keeps it.
  const bool continuous =
      ev.modulus <= 1e-12 * (1.0 + scale) || ev.modulus <= 0.75 * ev.coarse_modulus;
  if (!continuous) {
    ev.reason = "generator map not resolved by the grid (possible discontinuity)";
    return ev;
  }

  std::vector<std::size_t> nonzero;
  for (std::size_t k = 0; k < count; ++k)
    if (numkit::norm2(lifted.row(k)) > 1e-12 * (1.0 + scale)) nonzero.push_back(k);
  if (nonzero.empty()) {
    ev.verdict = Verdict::Holds;
    ev.reason = "all lifted generators vanish; the cone is {0}";
    return ev;
  }
  numkit::DenseMatrix unit(nonzero.size(), n + 1);
  for (std::size_t q = 0; q < nonzero.size(); ++q) {
    const double len = numkit::norm2(lifted.row(nonzero[q]));
    for (std::size_t c = 0; c <= n; ++c) unit(q, c) = lifted(nonzero[q], c) / len;
  }
  std::vector<std::size_t> all(nonzero.size());
  for (std::size_t q = 0; q < all.size(); ++q) all[q] = q;
  const auto groups = numkit::group_equal_rows(unit, all, 1e-12);

  // Separating hyperplane: <u_t, y> >= 1 for every normalized generator.
  numkit::LpProblem lp;
  lp.c.assign(n + 1, 0.0);
  lp.a_ub = numkit::DenseMatrix(groups.size(), n + 1);
  lp.b_ub.assign(groups.size(), -1.0);
  for (std::size_t q = 0; q < groups.size(); ++q)
    for (std::size_t c = 0; c <= n; ++c) lp.a_ub(q, c) = -unit(groups[q].front(), c);
  lp.a_eq = numkit::DenseMatrix(0, n + 1);
  lp.lower.assign(n + 1, -std::numeric_limits<double>::infinity());
  lp.upper.assign(n + 1, std::numeric_limits<double>::infinity());
  const numkit::LpResult res = numkit::solve_lp(lp, {lp_tol, lp_tol, 200000});
  if (res.status == numkit::LpStatus::Optimal) {
    ev.verdict = Verdict::Holds;
    ev.reason = "continuous generators with 0 outside their normalized convex hull; the cone is closed";
  } else if (res.status == numkit::LpStatus::Infeasible) {
    ev.reason = "hull contains origin";
  } else {
    ev.reason = "separation LP " + std::string(numkit::to_string(res.status));
  }
  return ev;
}

}  // namespace cqcert::cq
