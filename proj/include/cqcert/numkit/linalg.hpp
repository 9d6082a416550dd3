#pragma once

#include <cstddef>
#include <span>

#include "cqcert/numkit/dense.hpp"

namespace cqcert::numkit {

inline constexpr double kDefaultRankTol = 1e-8;

struct RankDecomposition {
  std::size_t rank = 0;
  DenseMatrix kernel_basis;  // cols x (cols - rank), orthonormal columns
  DenseMatrix image_basis;   // rows x rank, orthonormal columns
  Vector singular_values;    // descending
};

/// SVD-based rank decomposition. A singular value counts toward the rank when
/// it exceeds tol * sigma_max. Basis vectors are sign-normalized so that their
/// first significant component is positive. Throws DimensionError on an empty
/// matrix.
RankDecomposition rank_decompose(const DenseMatrix& a, double tol = kDefaultRankTol);

/// Orthonormal basis of the orthogonal complement of span(basis) in
/// R^ambient_dim. `basis` must have orthonormal columns (Gram residual at most
/// 1e-10), otherwise DimensionError is thrown.
DenseMatrix orth_complement(const DenseMatrix& basis, std::size_t ambient_dim);

/// Minimum-norm least-squares solution of A x = b through the truncated SVD.
Vector pseudo_solve(const DenseMatrix& a, std::span<const double> b, double tol = kDefaultRankTol);

/// Orthonormal basis of span(columns of a) using the same rank rule.
DenseMatrix orthonormal_basis(const DenseMatrix& a, double tol = kDefaultRankTol);

/// Smallest principal angle (radians) between the column spans of two
/// orthonormal bases. pi/2 when either is empty.
double smallest_principal_angle(const DenseMatrix& qa, const DenseMatrix& qb);

/// Largest principal angle between two subspaces of equal dimension; the
/// sine of the gap between them.
double largest_principal_angle(const DenseMatrix& qa, const DenseMatrix& qb);

/// Largest |entry| of Q^T Q - I.
double gram_residual(const DenseMatrix& q);

}  // namespace cqcert::numkit
