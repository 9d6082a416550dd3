#include "cqcert/numkit/nnls.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "cqcert/error.hpp"

namespace cqcert::numkit {

namespace {

// Minimum-norm least squares restricted to the columns in `set`.
Eigen::VectorXd restricted_solve(const Eigen::MatrixXd& a, const std::vector<Eigen::Index>& set,
                                 const Eigen::VectorXd& b) {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(a.cols());
  if (set.empty()) return full;
  Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(set.size()));
  for (std::size_t k = 0; k < set.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = a.col(set[k]);
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(sub);
  const Eigen::VectorXd z = cod.solve(b);
  for (std::size_t k = 0; k < set.size(); ++k) full(set[k]) = z(static_cast<Eigen::Index>(k));
  return full;
}

}  // namespace

NnlsResult nnls_stationarity(const DenseMatrix& columns, const std::vector<bool>& sign_mask,
                             const Vector& rhs) {
  if (sign_mask.size() != columns.cols())
    throw DimensionError("nnls: sign mask length differs from column count");
  if (columns.cols() > 0 && columns.rows() != rhs.size())
    throw DimensionError("nnls: rhs length differs from column length");

  NnlsResult out;
  const auto k = static_cast<Eigen::Index>(columns.cols());
  out.coeffs.assign(columns.cols(), 0.0);
  if (k == 0) {
    out.residual_norm = norm2(rhs);
    return out;
  }

  const auto m = static_cast<Eigen::Index>(columns.rows());
  Eigen::MatrixXd a(m, k);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      a(i, j) = columns(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(rhs.data(), m);

  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff() * std::max(1.0, b.cwiseAbs().maxCoeff()));
  const double grad_tol = 1e-12 * scale;

  std::vector<bool> passive(columns.cols(), false);
  std::vector<Eigen::Index> set;
  for (Eigen::Index j = 0; j < k; ++j) {
    if (!sign_mask[static_cast<std::size_t>(j)]) {
      passive[static_cast<std::size_t>(j)] = true;
      set.push_back(j);
    }
  }
  Eigen::VectorXd x = restricted_solve(a, set, b);

  auto rebuild = [&] {
    set.clear();
    for (Eigen::Index j = 0; j < k; ++j)
      if (passive[static_cast<std::size_t>(j)]) set.push_back(j);
  };

  const std::size_t max_outer = 30 * static_cast<std::size_t>(k) + 30;
  std::vector<bool> blocked(columns.cols(), false);
  for (; out.iterations < max_outer; ++out.iterations) {
    const Eigen::VectorXd w = a.transpose() * (b - a * x);
    Eigen::Index enter = -1;
    double best = grad_tol;
    for (Eigen::Index j = 0; j < k; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      if (passive[ju] || blocked[ju]) continue;
      if (w(j) > best) {
        best = w(j);
        enter = j;
      }
    }
    if (enter < 0) break;
    passive[static_cast<std::size_t>(enter)] = true;
    rebuild();

    bool moved = false;
    for (std::size_t inner = 0; inner < max_outer; ++inner) {
      const Eigen::VectorXd z = restricted_solve(a, set, b);
      double alpha = 1.0;
      bool clipped = false;
      for (Eigen::Index j : set) {
        const auto ju = static_cast<std::size_t>(j);
        if (!sign_mask[ju] || z(j) > 0.0) continue;
        const double denom = x(j) - z(j);
        const double ratio = denom > 0.0 ? x(j) / denom : 0.0;
        if (!clipped || ratio < alpha) alpha = ratio;
        clipped = true;
      }
      if (!clipped) {
        moved = moved || (z - x).cwiseAbs().maxCoeff() > 0.0;
        x = z;
        break;
      }
      alpha = std::clamp(alpha, 0.0, 1.0);
      x += alpha * (z - x);
      if (alpha > 0.0) moved = true;
      for (Eigen::Index j : std::vector<Eigen::Index>(set)) {
        const auto ju = static_cast<std::size_t>(j);
        if (sign_mask[ju] && x(j) <= 1e-15 * scale) {
          x(j) = 0.0;
          passive[ju] = false;
        }
      }
      rebuild();
    }
    // A column that leaves again without moving the iterate would re-enter
    // forever; park it until the iterate changes.
    if (!moved && !passive[static_cast<std::size_t>(enter)]) {
      blocked[static_cast<std::size_t>(enter)] = true;
    } else {
      std::fill(blocked.begin(), blocked.end(), false);
    }
  }

  for (Eigen::Index j = 0; j < k; ++j) {
    double v = x(j);
    if (sign_mask[static_cast<std::size_t>(j)]) v = std::max(v, 0.0);
    out.coeffs[static_cast<std::size_t>(j)] = v;
  }
  const Eigen::VectorXd cx = Eigen::Map<const Eigen::VectorXd>(out.coeffs.data(), k);
  out.residual_norm = (a * cx - b).norm();
  return out;
}

}  // namespace cqcert::numkit
