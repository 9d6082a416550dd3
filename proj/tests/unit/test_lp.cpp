#include <doctest.h>

#include <cmath>
#include <limits>

#include "cqcert/error.hpp"
#include "cqcert/kernels.hpp"
#include "cqcert/numkit/lp.hpp"
#include "cqcert/numkit/nnls.hpp"
#include "cqcert/rng.hpp"

using namespace cqcert;
using numkit::DenseMatrix;
using numkit::LpProblem;
using numkit::LpStatus;
using numkit::Vector;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double lower_of(const LpProblem& p, std::size_t j) { return p.lower.empty() ? 0.0 : p.lower[j]; }
double upper_of(const LpProblem& p, std::size_t j) { return p.upper.empty() ? kInf : p.upper[j]; }

// Optimality certificate recomputed from scratch: primal feasibility, dual
// sign conditions, complementary slackness and a zero duality gap.
void check_optimal(const LpProblem& p, const numkit::LpResult& r, double tol) {
  const std::size_t n = p.c.size();
  REQUIRE(r.x.size() == n);
  const Vector ax = p.a_ub.rows() > 0 ? p.a_ub.apply(r.x) : Vector{};
  for (std::size_t i = 0; i < ax.size(); ++i) {
    CHECK(ax[i] <= p.b_ub[i] + tol);
    CHECK(r.duals_ub[i] <= tol);
    CHECK(std::fabs(r.duals_ub[i] * (p.b_ub[i] - ax[i])) <= tol);
  }
  if (p.a_eq.rows() > 0) {
    const Vector ex = p.a_eq.apply(r.x);
    for (std::size_t i = 0; i < ex.size(); ++i) CHECK(std::fabs(ex[i] - p.b_eq[i]) <= tol);
  }
  Vector red = p.c;
  if (p.a_ub.rows() > 0) red = numkit::axpy(-1.0, p.a_ub.apply_transposed(r.duals_ub), red);
  if (p.a_eq.rows() > 0) red = numkit::axpy(-1.0, p.a_eq.apply_transposed(r.duals_eq), red);
  double dual = 0.0;
  for (std::size_t i = 0; i < p.b_ub.size(); ++i) dual += p.b_ub[i] * r.duals_ub[i];
  for (std::size_t i = 0; i < p.b_eq.size(); ++i) dual += p.b_eq[i] * r.duals_eq[i];
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = lower_of(p, j), hi = upper_of(p, j);
    CHECK(r.x[j] >= lo - tol);
    CHECK(r.x[j] <= hi + tol);
    CHECK(std::fabs(red[j] - r.reduced_costs[j]) <= tol);
    if (red[j] > tol) {
      CHECK(std::fabs(r.x[j] - lo) <= tol);
      dual += red[j] * lo;
    } else if (red[j] < -tol) {
      CHECK(std::fabs(r.x[j] - hi) <= tol);
      dual += red[j] * hi;
    }
  }
  double primal = 0.0;
  for (std::size_t j = 0; j < n; ++j) primal += p.c[j] * r.x[j];
  CHECK(std::fabs(primal - r.objective) <= tol * std::max(1.0, std::fabs(primal)));
  CHECK(std::fabs(primal - dual) <= tol * std::max(1.0, std::fabs(primal)));
}

}  // namespace

TEST_CASE("one-variable LP") {
  LpProblem p;
  p.c = {-1.0};
  p.a_ub = DenseMatrix::from_rows({{1.0}});
  p.b_ub = {1.0};
  const auto r = numkit::solve_lp(p);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.x[0] == doctest::Approx(1.0));
  CHECK(r.objective == doctest::Approx(-1.0));
  check_optimal(p, r, 1e-8);
}

TEST_CASE("membership LP outside the half-space cone") {
  // v = R lambda + S c with R = (1,-1,1), S = {(1,1,0), (0,1,0)}: the cone is
  // {x3 >= 0}, so v = (0,0,-1) is infeasible.
  LpProblem p;
  p.c = {1.0, 0.0, 0.0};
  p.a_eq = DenseMatrix::from_rows({{1, 1, 0}, {-1, 1, 1}, {1, 0, 0}});
  p.b_eq = {0, 0, -1};
  p.lower = {0.0, -kInf, -kInf};
  p.upper = {kInf, kInf, kInf};
  const auto r = numkit::solve_lp(p);
  REQUIRE(r.status == LpStatus::Infeasible);
  const auto chk = numkit::check_farkas(p, r.farkas);
  CHECK(chk.stationarity <= 1e-9);
  CHECK(chk.sign_violation <= 1e-12);
  CHECK(chk.value < -1e-10);
  // The separating direction y = -q satisfies <y, ray> <= 0, <y, s> = 0 and
  // <y, v> > 0; it is proportional to (0, 0, -1).
  const Vector& q = r.farkas.eq;
  const double nq = numkit::norm2(q);
  REQUIRE(nq > 0);
  CHECK(std::fabs(q[0]) / nq <= 1e-9);
  CHECK(std::fabs(q[1]) / nq <= 1e-9);
  CHECK(-q[2] / nq == doctest::Approx(-1.0));
}

TEST_CASE("unbounded and bound-infeasible LPs") {
  LpProblem p;
  p.c = {-1.0, 0.0};
  p.a_ub = DenseMatrix::from_rows({{0.0, 1.0}});
  p.b_ub = {1.0};
  CHECK(numkit::solve_lp(p).status == LpStatus::Unbounded);
  LpProblem q;
  q.c = {1.0};
  q.lower = {2.0};
  q.upper = {1.0};
  CHECK(numkit::solve_lp(q).status == LpStatus::Infeasible);
  LpProblem bad;
  bad.c = {1.0, 2.0};
  bad.a_ub = DenseMatrix::from_rows({{1.0}});
  bad.b_ub = {1.0};
  CHECK_THROWS_AS(numkit::solve_lp(bad), DimensionError);
}

TEST_CASE("degenerate LP terminates under Bland's rule") {
  // Classic cycling example (Beale).
  LpProblem p;
  p.c = {-0.75, 150, -0.02, 6};
  p.a_ub = DenseMatrix::from_rows({{0.25, -60, -0.04, 9}, {0.5, -90, -0.02, 3}, {0, 0, 1, 0}});
  p.b_ub = {0, 0, 1};
  const auto r = numkit::solve_lp(p);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.objective == doctest::Approx(-0.05));
  check_optimal(p, r, 1e-8);
}

TEST_CASE("property: random feasible LPs satisfy the optimality certificate") {
  Rng rng(31, Stream::Testing);
  int solved = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(6), m_ub = rng.below(6), m_eq = rng.below(std::min<std::size_t>(n, 3));
    // Feasible by construction around a random interior point.
    Vector x0(n);
    for (double& v : x0) v = rng.uniform(-1.0, 1.0);
    LpProblem p;
    p.c.resize(n);
    for (double& v : p.c) v = rng.uniform(-1.0, 1.0);
    p.a_ub = DenseMatrix(m_ub, n);
    p.b_ub.resize(m_ub);
    for (std::size_t i = 0; i < m_ub; ++i) {
      for (std::size_t j = 0; j < n; ++j) p.a_ub(i, j) = rng.uniform(-1.0, 1.0);
      p.b_ub[i] = kernels::dot(p.a_ub.row(i), x0) + rng.uniform(0.0, 1.0);
    }
    p.a_eq = DenseMatrix(m_eq, n);
    p.b_eq.resize(m_eq);
    for (std::size_t i = 0; i < m_eq; ++i) {
      for (std::size_t j = 0; j < n; ++j) p.a_eq(i, j) = rng.uniform(-1.0, 1.0);
      p.b_eq[i] = kernels::dot(p.a_eq.row(i), x0);
    }
    p.lower.resize(n);
    p.upper.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      p.lower[j] = rng.below(4) == 0 ? -kInf : x0[j] - rng.uniform(0.1, 2.0);
      p.upper[j] = rng.below(4) == 0 ? kInf : x0[j] + rng.uniform(0.1, 2.0);
    }
    const auto r = numkit::solve_lp(p);
    REQUIRE(r.status != LpStatus::Infeasible);
    if (r.status == LpStatus::Optimal) {
      ++solved;
      check_optimal(p, r, 1e-8);
    }
  }
  CHECK(solved > 100);
}

TEST_CASE("property: random infeasible LPs carry a valid Farkas ray") {
  Rng rng(32, Stream::Testing);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.below(5), m = 1 + rng.below(5);
    LpProblem p;
    p.c.assign(n, 0.0);
    p.a_ub = DenseMatrix(m + 1, n);
    p.b_ub.resize(m + 1);
    Vector combo(n, 0.0);
    double rhs = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double w = rng.uniform(0.1, 1.0);
      for (std::size_t j = 0; j < n; ++j) {
        p.a_ub(i, j) = rng.uniform(-1.0, 1.0);
        combo[j] += w * p.a_ub(i, j);
      }
      p.b_ub[i] = rng.uniform(-1.0, 1.0);
      rhs += w * p.b_ub[i];
    }
    // The last row contradicts a positive combination of the others.
    for (std::size_t j = 0; j < n; ++j) p.a_ub(m, j) = -combo[j];
    p.b_ub[m] = -rhs - 0.5;
    p.lower.assign(n, -kInf);
    p.upper.assign(n, kInf);
    const auto r = numkit::solve_lp(p);
    REQUIRE(r.status == LpStatus::Infeasible);
    const auto chk = numkit::check_farkas(p, r.farkas);
    CHECK(chk.stationarity <= 1e-9);
    CHECK(chk.sign_violation <= 1e-12);
    CHECK(chk.value < -1e-10);
  }
}

TEST_CASE("nnls: worked stationarity systems") {
  // Columns (1,-1,1) >= 0 and free (1,1,0), (0,1,0); rhs = -grad f for
  // f = x1 + x2 - x3. The 3x3 system solves to (1, -2, 2).
  const DenseMatrix cols = DenseMatrix::from_columns(3, {{1, -1, 1}, {1, 1, 0}, {0, 1, 0}});
  const auto r = numkit::nnls_stationarity(cols, {true, false, false}, Vector{-1, -1, 1});
  CHECK(r.coeffs[0] == doctest::Approx(1.0));
  CHECK(r.coeffs[1] == doctest::Approx(-2.0));
  CHECK(r.coeffs[2] == doctest::Approx(2.0));
  CHECK(r.residual_norm <= 1e-12);

  const auto z = numkit::nnls_stationarity(cols, {true, false, false}, Vector{0, 0, 0});
  for (double c : z.coeffs) CHECK(c == 0.0);
  CHECK(z.residual_norm == 0.0);

  const auto b = numkit::nnls_stationarity(DenseMatrix::from_columns(3, {{1, 0, 0}}), {true}, Vector{-1, 0, 0});
  CHECK(b.coeffs[0] == 0.0);
  CHECK(b.residual_norm == doctest::Approx(1.0));

  const auto e = numkit::nnls_stationarity(DenseMatrix(2, 0), {}, Vector{3, 4});
  CHECK(e.residual_norm == doctest::Approx(5.0));
}

TEST_CASE("property: nnls optimality conditions") {
  Rng rng(33, Stream::Testing);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(6), k = 1 + rng.below(7);
    DenseMatrix a(n, k);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < k; ++j) a(i, j) = rng.normal();
    std::vector<bool> mask(k);
    for (std::size_t j = 0; j < k; ++j) mask[j] = rng.below(3) != 0;
    Vector rhs(n);
    for (double& v : rhs) v = rng.normal();
    const auto r = numkit::nnls_stationarity(a, mask, rhs);
    const Vector resid = numkit::axpy(-1.0, rhs, a.apply(r.coeffs));
    CHECK(numkit::norm2(resid) == doctest::Approx(r.residual_norm).epsilon(1e-9));
    // Gradient of 0.5||Ac - b||^2 is A^T (Ac - b); KKT of the sign-constrained
    // least-squares problem.
    const Vector grad = a.apply_transposed(resid);
    for (std::size_t j = 0; j < k; ++j) {
      if (mask[j]) {
        CHECK(r.coeffs[j] >= 0.0);
        if (r.coeffs[j] == 0.0) {
          CHECK(grad[j] >= -1e-8);
        } else {
          CHECK(std::fabs(grad[j]) <= 1e-8);
        }
      } else {
        CHECK(std::fabs(grad[j]) <= 1e-8);
      }
    }
  }
}
