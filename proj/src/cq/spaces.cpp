#include <cmath>
#include <stdexcept>

#include "cqcert/cq/cq.hpp"
#include "cqcert/error.hpp"
#include "cqcert/numkit/linalg.hpp"

namespace cqcert::cq {

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Holds:
      return "holds";
    case Verdict::Fails:
      return "fails";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

Verdict conjunction(Verdict a, Verdict b) noexcept {
  if (a == Verdict::Fails || b == Verdict::Fails) return Verdict::Fails;
  if (a == Verdict::Holds && b == Verdict::Holds) return Verdict::Holds;
  return Verdict::Inconclusive;
}

void CheckConfig::validate() const {
  auto bad = [](const char* what) { throw std::invalid_argument(what); };
  if (!(rank_tol > 0.0 && rank_tol < 1.0)) bad("rank_tol must lie in (0, 1)");
  if (!(eq_radius > 0.0) || !std::isfinite(eq_radius)) bad("eq_radius must be positive");
  if (eq_samples < 1) bad("eq_samples must be at least 1");
  if (eps_grid.empty()) bad("eps_grid must not be empty");
  for (std::size_t k = 0; k < eps_grid.size(); ++k) {
    if (!(eps_grid[k] > 0.0) || !std::isfinite(eps_grid[k])) bad("eps_grid entries must be positive");
    if (k > 0 && !(eps_grid[k] < eps_grid[k - 1])) bad("eps_grid must be strictly decreasing");
  }
  if (!(lp_tol > 0.0)) bad("lp_tol must be positive");
  if (!(angle_tol > 0.0)) bad("angle_tol must be positive");
  if (!(margin_tol > 0.0)) bad("margin_tol must be positive");
}

SpaceSplit decompose_spaces(const numkit::DenseMatrix& j_h, double tol) {
  SpaceSplit s;
  s.n = j_h.cols();
  s.m = j_h.rows();
  if (s.n == 0) throw DimensionError("decompose_spaces: zero-dimensional domain");
  if (s.m == 0) {
    s.e1 = numkit::DenseMatrix(s.n, 0);
    s.e2 = numkit::DenseMatrix::identity(s.n);
    return s;
  }
  const numkit::RankDecomposition rd = numkit::rank_decompose(j_h, tol);
  s.rank = rd.rank;
  s.e2 = rd.kernel_basis;
  s.e1 = numkit::orth_complement(s.e2, s.n);
  s.f1 = rd.image_basis;
  s.f2 = numkit::orth_complement(s.f1, s.m);
  s.p_f1 = s.f1 * s.f1.transposed();
  s.singular_values = rd.singular_values;
  return s;
}

}  // namespace cqcert::cq
