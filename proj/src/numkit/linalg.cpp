#include "cqcert/numkit/linalg.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "cqcert/error.hpp"

namespace cqcert::numkit {

namespace {

using EMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const EMatrix> view(const DenseMatrix& m) {
  return {m.entries().data(), static_cast<Eigen::Index>(m.rows()),
          static_cast<Eigen::Index>(m.cols())};
}

// Columns [first, first+count) of an Eigen matrix, sign-normalized.
DenseMatrix take_columns(const Eigen::MatrixXd& m, Eigen::Index first, Eigen::Index count) {
  DenseMatrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(count));
  for (Eigen::Index j = 0; j < count; ++j) {
    Eigen::VectorXd col = m.col(first + j);
    const double scale = col.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      if (std::fabs(col(i)) > 1e-9 * scale) {
        if (col(i) < 0.0) col = -col;
        break;
      }
    }
    for (Eigen::Index i = 0; i < col.size(); ++i)
      out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = col(i);
  }
  return out;
}

std::size_t count_rank(const Eigen::VectorXd& sv, double tol) {
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double cutoff = tol * sv(0);
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++r;
  return r;
}

}  // namespace

RankDecomposition rank_decompose(const DenseMatrix& a, double tol) {
  if (a.empty()) throw DimensionError("rank_decompose: empty matrix");
  if (!(tol > 0.0)) throw std::invalid_argument("rank_decompose: tol must be positive");
  const Eigen::MatrixXd m = view(a);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd sv = svd.singularValues();
  RankDecomposition out;
  out.rank = count_rank(sv, tol);
  const auto r = static_cast<Eigen::Index>(out.rank);
  out.kernel_basis = take_columns(svd.matrixV(), r, m.cols() - r);
  out.image_basis = take_columns(svd.matrixU(), 0, r);
  out.singular_values.assign(sv.data(), sv.data() + sv.size());
  return out;
}

double gram_residual(const DenseMatrix& q) {
  if (q.cols() == 0) return 0.0;
  const Eigen::MatrixXd m = view(q);
  const Eigen::MatrixXd g =
      m.transpose() * m - Eigen::MatrixXd::Identity(m.cols(), m.cols());
  return g.cwiseAbs().maxCoeff();
}

DenseMatrix orth_complement(const DenseMatrix& basis, std::size_t ambient_dim) {
  const std::size_t k = basis.cols();
  if (k > 0 && basis.rows() != ambient_dim)
    throw DimensionError("orth_complement: basis rows differ from ambient dimension");
  if (k > ambient_dim) throw DimensionError("orth_complement: more columns than ambient dimension");
  if (gram_residual(basis) > 1e-10)
    throw DimensionError("orth_complement: basis columns are not orthonormal");
  const auto n = static_cast<Eigen::Index>(ambient_dim);
  if (k == 0) return DenseMatrix::identity(ambient_dim);
  if (k == ambient_dim) return DenseMatrix(ambient_dim, 0);
  const Eigen::MatrixXd m = view(basis);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const auto kk = static_cast<Eigen::Index>(k);
  return take_columns(q, kk, n - kk);
}

Vector pseudo_solve(const DenseMatrix& a, std::span<const double> b, double tol) {
  if (b.size() != a.rows()) throw DimensionError("pseudo_solve: rhs length mismatch");
  if (a.empty()) return Vector(a.cols(), 0.0);
  const Eigen::MatrixXd m = view(a);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  const auto r = static_cast<Eigen::Index>(count_rank(sv, tol));
  const Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(b.size()));
  Eigen::VectorXd coeff = svd.matrixU().leftCols(r).transpose() * rhs;
  for (Eigen::Index i = 0; i < r; ++i) coeff(i) /= sv(i);
  const Eigen::VectorXd x = svd.matrixV().leftCols(r) * coeff;
  return Vector(x.data(), x.data() + x.size());
}

DenseMatrix orthonormal_basis(const DenseMatrix& a, double tol) {
  if (a.empty()) return DenseMatrix(a.rows(), 0);
  return rank_decompose(a, tol).image_basis;
}

double smallest_principal_angle(const DenseMatrix& qa, const DenseMatrix& qb) {
  if (qa.cols() == 0 || qb.cols() == 0) return std::numbers::pi / 2;
  if (qa.rows() != qb.rows()) throw DimensionError("principal angle: ambient dimension mismatch");
  // Sines of the principal angles are the singular values of (I - Qa Qa^T) Qb;
  // the extra ones (when dim b > dim a) equal 1 and never win the minimum.
  const Eigen::MatrixXd a = view(qa);
  const Eigen::MatrixXd b = view(qb);
  const Eigen::MatrixXd resid = b - a * (a.transpose() * b);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(resid);
  const Eigen::VectorXd sv = svd.singularValues();
  const double smin = sv.size() == 0 ? 1.0 : sv(sv.size() - 1);
  return std::asin(std::clamp(smin, 0.0, 1.0));
}

double largest_principal_angle(const DenseMatrix& qa, const DenseMatrix& qb) {
  if (qa.cols() != qb.cols()) throw DimensionError("principal angle: subspace dimension mismatch");
  if (qa.cols() == 0) return 0.0;
  if (qa.rows() != qb.rows()) throw DimensionError("principal angle: ambient dimension mismatch");
  const Eigen::MatrixXd a = view(qa);
  const Eigen::MatrixXd b = view(qb);
  const Eigen::MatrixXd resid = b - a * (a.transpose() * b);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(resid);
  const double smax = svd.singularValues().size() == 0 ? 0.0 : svd.singularValues()(0);
  return std::asin(std::clamp(smax, 0.0, 1.0));
}

}  // namespace cqcert::numkit
