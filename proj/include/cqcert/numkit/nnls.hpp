#pragma once

#include <cstddef>
#include <vector>

#include "cqcert/numkit/dense.hpp"

namespace cqcert::numkit {

struct NnlsResult {
  Vector coeffs;
  double residual_norm = 0.0;
  std::size_t iterations = 0;
};

/// Lawson-Hanson active set for
///   min || columns * c - rhs ||_2   s.t.  c[i] >= 0 where sign_mask[i].
/// Unmasked coefficients are free and stay in the passive set throughout.
/// Subproblems use minimum-norm least squares, so rank-deficient column sets
/// are accepted. An empty column set returns residual ||rhs||.
NnlsResult nnls_stationarity(const DenseMatrix& columns, const std::vector<bool>& sign_mask,
                             const Vector& rhs);

}  // namespace cqcert::numkit
