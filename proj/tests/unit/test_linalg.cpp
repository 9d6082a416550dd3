#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cqcert/error.hpp"
#include "cqcert/numkit/dense.hpp"
#include "cqcert/numkit/linalg.hpp"
#include "cqcert/rng.hpp"

using namespace cqcert;
using numkit::DenseMatrix;
using numkit::Vector;

namespace {

DenseMatrix unit_column(Vector v) {
  const double n = numkit::norm2(v);
  for (double& x : v) x /= n;
  return DenseMatrix::from_columns(v.size(), {v});
}

DenseMatrix random_matrix(Rng& rng, std::size_t r, std::size_t c) {
  DenseMatrix a(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) a(i, j) = rng.normal();
  return a;
}

// Product of random factors with inner dimension k has rank min(k, r, c)
// almost surely.
DenseMatrix random_rank(Rng& rng, std::size_t r, std::size_t c, std::size_t k) {
  return random_matrix(rng, r, k) * random_matrix(rng, k, c);
}

}  // namespace

TEST_CASE("dense: construction and products") {
  const DenseMatrix a = DenseMatrix::from_rows({{1, 2}, {3, 4}, {5, 6}});
  CHECK(a.rows() == 3);
  CHECK(a.cols() == 2);
  CHECK(a.apply(Vector{1, 1}) == Vector{3, 7, 11});
  CHECK(a.apply_transposed(Vector{1, 0, 1}) == Vector{6, 8});
  CHECK(a.transposed()(1, 2) == 6);
  CHECK((a.transposed() * a)(0, 0) == 35);
  CHECK_THROWS_AS(DenseMatrix(2, 2, {1, 2, 3}), DimensionError);
  CHECK_THROWS_AS(DenseMatrix(1, 1, {std::nan("")}), NumericError);
  CHECK_THROWS_AS(a.apply(Vector{1}), DimensionError);
}

TEST_CASE("dense: row grouping") {
  const DenseMatrix a = DenseMatrix::from_rows({{1, 0}, {0, 1}, {1, 0}, {1, 1e-13}, {0, 1}});
  const std::vector<std::size_t> all = {0, 1, 2, 3, 4};
  const auto g = numkit::group_equal_rows(a, all, 1e-12);
  REQUIRE(g.size() == 2);
  CHECK(g[0] == std::vector<std::size_t>{0, 2, 3});
  CHECK(g[1] == std::vector<std::size_t>{1, 4});
  CHECK(numkit::group_equal_rows(a, all, 0.0).size() == 3);
}

TEST_CASE("rank_decompose: Jacobian of the three-dimensional example at the origin") {
  const DenseMatrix a = DenseMatrix::from_rows({{0, 0, 0}, {1, 1, 0}, {0, 1, 0}});
  const auto d = numkit::rank_decompose(a);
  CHECK(d.rank == 2);
  REQUIRE(d.kernel_basis.cols() == 1);
  CHECK(numkit::largest_principal_angle(d.kernel_basis, unit_column({0, 0, 1})) <= 1e-12);
  const DenseMatrix plane = DenseMatrix::from_columns(3, {{0, 1, 0}, {0, 0, 1}});
  CHECK(numkit::largest_principal_angle(d.image_basis, plane) <= 1e-12);
}

TEST_CASE("rank_decompose: two-dimensional example and zero matrix") {
  const auto d = numkit::rank_decompose(DenseMatrix::from_rows({{2, 0}, {0, 1}, {3, 1}}));
  CHECK(d.rank == 2);
  CHECK(d.kernel_basis.cols() == 0);
  const auto z = numkit::rank_decompose(DenseMatrix(3, 3));
  CHECK(z.rank == 0);
  CHECK(z.kernel_basis.cols() == 3);
  CHECK(numkit::gram_residual(z.kernel_basis) <= 1e-14);
  CHECK_THROWS_AS(numkit::rank_decompose(DenseMatrix(0, 3)), DimensionError);
}

TEST_CASE("orth_complement: worked cases") {
  const DenseMatrix plane = DenseMatrix::from_columns(3, {{0, 1, 0}, {0, 0, 1}});
  const DenseMatrix c = numkit::orth_complement(plane, 3);
  REQUIRE(c.cols() == 1);
  CHECK(numkit::largest_principal_angle(c, unit_column({1, 0, 0})) <= 1e-12);

  const DenseMatrix q = numkit::orthonormal_basis(DenseMatrix::from_columns(3, {{2, 0, 3}, {0, 1, 1}}));
  const DenseMatrix f2 = numkit::orth_complement(q, 3);
  REQUIRE(f2.cols() == 1);
  CHECK(numkit::largest_principal_angle(f2, unit_column({1.5, 1, -1})) <= 1e-9);

  CHECK(numkit::orth_complement(DenseMatrix::identity(2), 2).cols() == 0);
  CHECK_THROWS_AS(numkit::orth_complement(DenseMatrix::from_columns(2, {{1, 1}}), 2), DimensionError);
}

TEST_CASE("principal angles") {
  const DenseMatrix e1 = unit_column({1, 0});
  const DenseMatrix diag = unit_column({1, 1});
  CHECK(numkit::smallest_principal_angle(e1, diag) == doctest::Approx(std::numbers::pi / 4));
  CHECK(numkit::smallest_principal_angle(e1, DenseMatrix(2, 0)) == doctest::Approx(std::numbers::pi / 2));
  CHECK(numkit::largest_principal_angle(e1, unit_column({0, 1})) == doctest::Approx(std::numbers::pi / 2));
}

TEST_CASE("pseudo_solve: minimum-norm solution") {
  const DenseMatrix a = DenseMatrix::from_rows({{1, 1}});
  const Vector x = numkit::pseudo_solve(a, Vector{2});
  CHECK(x[0] == doctest::Approx(1.0));
  CHECK(x[1] == doctest::Approx(1.0));
  const DenseMatrix b = DenseMatrix::from_rows({{1, 0}, {0, 0}});
  const Vector y = numkit::pseudo_solve(b, Vector{3, 5});
  CHECK(y[0] == doctest::Approx(3.0));
  CHECK(y[1] == doctest::Approx(0.0));
}

TEST_CASE("property: kernel and image bases on random matrices") {
  Rng rng(21, Stream::Testing);
  const double tol = numkit::kDefaultRankTol;
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t r = 1 + rng.below(6), c = 1 + rng.below(6), k = 1 + rng.below(6);
    const DenseMatrix a = random_rank(rng, r, c, k);
    const auto d = numkit::rank_decompose(a, tol);
    CHECK(d.rank == std::min({r, c, k}));
    CHECK(d.kernel_basis.cols() == c - d.rank);
    const double smax = d.singular_values.front();
    if (d.kernel_basis.cols() > 0) {
      const DenseMatrix ak = a * d.kernel_basis;
      CHECK(numkit::norm_inf(ak.entries()) <= 10 * tol * smax);
    }
    CHECK(numkit::gram_residual(d.kernel_basis) <= 1e-10);
    CHECK(numkit::gram_residual(d.image_basis) <= 1e-10);
    // Projection of A z onto the image basis reproduces A z.
    Vector z(c);
    for (double& v : z) v = rng.normal();
    const Vector az = a.apply(z);
    const Vector back = d.image_basis.apply(d.image_basis.apply_transposed(az));
    CHECK(numkit::norm_inf(numkit::axpy(-1.0, back, az)) <= 1e-9 * std::max(1.0, numkit::norm_inf(az)));
  }
}

TEST_CASE("property: basis plus complement is orthonormal") {
  Rng rng(22, Stream::Testing);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + rng.below(7), k = rng.below(n + 1);
    DenseMatrix q = k == 0 ? DenseMatrix(n, 0) : numkit::orthonormal_basis(random_matrix(rng, n, k));
    const DenseMatrix c = numkit::orth_complement(q, n);
    CHECK(q.cols() + c.cols() == n);
    std::vector<Vector> cols;
    for (std::size_t j = 0; j < q.cols(); ++j) cols.push_back(q.column(j));
    for (std::size_t j = 0; j < c.cols(); ++j) cols.push_back(c.column(j));
    CHECK(numkit::gram_residual(DenseMatrix::from_columns(n, cols)) <= 1e-10);
  }
}
