#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "cqcert/error.hpp"
#include "cqcert/model/problem.hpp"
#include "cqcert/model/problem_file.hpp"
#include "fixtures.hpp"
#include "random_problems.hpp"

using namespace cqcert;
using model::Problem;
using numkit::DenseMatrix;
using numkit::Vector;

namespace {

constexpr std::string_view kR3Text = R"(dim = 3
objective = "x1 + x2 - x3"
equality = ["x1^2", "x1 + x2", "x1^3 + x2"]
inequality = "t*x1^2 + x1 - x2 + x3"
index_set = { type = "interval", lo = 0, hi = 1, open_lo = true, open_hi = true }
point = [0, 0, 0]
)";

bool subset(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

TEST_CASE("load: the three-dimensional example") {
  const model::ProblemSpec spec = model::load_problem(kR3Text);
  CHECK(spec.n == 3);
  CHECK(spec.equalities.size() == 3);
  CHECK(spec.family_kind == model::FamilyKind::Parametric);
  CHECK(spec.index_set.kind == model::IndexKind::Interval);
  CHECK(spec.index_set.grid_points == 201);
  const auto grid = spec.index_set.grid();
  REQUIRE(grid.size() == 201);
  CHECK(grid.front() > 0.0);
  CHECK(grid.back() < 1.0);
  CHECK(std::is_sorted(grid.begin(), grid.end()));
}

TEST_CASE("load: pure equality file, sections and comments") {
  const auto spec = model::load_problem("dim = 1\nequality = [\"x1\"]  # one row\npoint = [0]\n");
  CHECK(spec.family_kind == model::FamilyKind::None);
  CHECK(spec.objective_text == "0");
  const auto sec = model::load_problem(
      "dim = 1\ninequality = \"x1 - t\"\npoint = [0]\n\n[index_set]\ntype = \"finite\"\nvalues = [0, 0.5,\n  1]\n");
  CHECK(sec.index_set.values == std::vector<double>{0, 0.5, 1});
}

TEST_CASE("load: list family defaults to indices 1..k") {
  const auto spec = model::load_problem("dim = 1\ninequality_list = ['x1', '-x1']\npoint = [0]\n");
  CHECK(spec.index_set.values == std::vector<double>{1, 2});
}

TEST_CASE("load: point of the wrong length") {
  CHECK_THROWS_AS(model::load_problem("dim = 2\npoint = [0, 0, 0]\n"), DimensionError);
}

TEST_CASE("load: malformed corpus gives located diagnostics") {
  struct Case {
    const char* file;
    const char* needle;
  };
  const Case cases[] = {
      {"bad_expression.toml", "line 2:"},          {"point_length.toml", "point has 3 entries"},
      {"unknown_key.toml", "unknown key 'colour'"}, {"duplicate_key.toml", "duplicate key 'dim'"},
      {"unterminated_array.toml", "unterminated array"}, {"unterminated_string.toml", "unterminated string"},
      {"reversed_interval.toml", "lo < hi"},        {"finite_count.toml", "one value per entry"},
      {"param_in_objective.toml", "index parameter"}, {"fractional_exponent.toml", "non-integer exponent"},
      {"index_without_family.toml", "without inequalities"}, {"zero_dim.toml", "'dim'"},
      {"both_families.toml", "not both"},           {"missing_dim.toml", "missing required key 'dim'"},
      {"point_type.toml", "must be a number"},
  };
  const std::filesystem::path dir = std::filesystem::path(CQCERT_TEST_DATA) / "malformed";
  std::size_t files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.path().extension() == ".toml") ++files;
  CHECK(files == std::size(cases));
  for (const Case& c : cases) {
    INFO(c.file);
    try {
      model::load_problem_file(dir / c.file);
      FAIL("accepted a malformed file");
    } catch (const Error& e) {
      const std::string what = e.what();
      CHECK(what.find(c.needle) != std::string::npos);
      CHECK(what.rfind("line ", 0) == 0);
    }
  }
  CHECK_THROWS_AS(model::load_problem_file(dir / "does-not-exist.toml"), Error);
}

TEST_CASE("load: expression errors report the column inside the string") {
  try {
    model::load_problem("dim = 2\nobjective = \"x1 + x7\"\n");
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 19);
  }
}

TEST_CASE("eval_G: feasible ray and an infeasible point") {
  const Problem p = cqtest::from_text(kR3Text);
  const auto on_ray = p.eval_G({0, 0, -1});
  CHECK(on_ray.h == Vector{0, 0, 0});
  for (double g : on_ray.g) CHECK(g == -1.0);
  CHECK(on_ray.k_violation == 0.0);
  // At (1,-1,0) the equality residual is 1, but g_t = t + 2 dominates the
  // violation max(||H||_inf, max_t g_t, 0).
  const auto off = p.eval_G({1, -1, 0});
  CHECK(off.h == Vector{1, 0, 0});
  CHECK(off.k_violation == doctest::Approx(2.0 + p.t_values().back()));
  CHECK(cqtest::from_text("dim = 3\nequality = [\"x1^2\", \"x1 + x2\", \"x1^3 + x2\"]\npoint = [0, 0, 0]\n")
            .eval_G({1, -1, 0})
            .k_violation == 1.0);
  const Problem q = cqtest::from_text("dim = 1\nequality = [\"x1\"]\npoint = [0]\n");
  CHECK(q.eval_G({0}).k_violation == 0.0);
  CHECK_THROWS_AS(p.eval_G({0, 0}), DimensionError);
}

TEST_CASE("jacobians: worked matrices") {
  const Problem p = cqtest::from_text(kR3Text);
  const auto b = p.jacobians_at({0, 0, 0});
  CHECK(b.j_h == DenseMatrix::from_rows({{0, 0, 0}, {1, 1, 0}, {0, 1, 0}}));
  CHECK(b.grad_f == Vector{1, 1, -1});
  REQUIRE(b.g_rows.rows() == 201);
  for (std::size_t k = 0; k < b.g_rows.rows(); ++k) {
    const auto row = b.g_rows.row(k);
    CHECK(Vector(row.begin(), row.end()) == Vector{1, -1, 1});
  }
  CHECK(b.reliable);
  const Problem r = cqtest::builtin("rank-r2");
  CHECK(r.jacobians_at({1, 0}).j_h == DenseMatrix::from_rows({{2, 0}, {0, 1}, {3, 1}}));
}

TEST_CASE("finite differences: worked rows") {
  const Problem p = cqtest::from_text(kR3Text);
  const auto fd = p.fd_jacobian({0, 0, 0}, 1e-6);
  CHECK(std::fabs(fd.j_h(0, 0)) <= 1e-9);
  CHECK(std::fabs(fd.j_h(1, 0) - 1) <= 1e-9);
  CHECK(std::fabs(fd.j_h(1, 1) - 1) <= 1e-9);
  CHECK(std::fabs(fd.j_h(1, 2)) <= 1e-9);
  const std::size_t mid = 100;  // t = 0.5 on the 201-point grid
  CHECK(p.t_values()[mid] == doctest::Approx(0.5));
  CHECK(std::fabs(fd.g_rows(mid, 0) - 1) <= 1e-9);
  CHECK(std::fabs(fd.g_rows(mid, 1) + 1) <= 1e-9);
  CHECK(std::fabs(fd.g_rows(mid, 2) - 1) <= 1e-9);
}

TEST_CASE("eps-active sets: worked cases") {
  const Problem p = cqtest::from_text(kR3Text);
  CHECK(p.eps_active_set({0, 0, 0}, 1e-3).members.size() == 201);
  CHECK(p.eps_active_set({0, 0, -1}, 0.5).members.empty());
  CHECK(p.eps_active_set({0, 0, -1}, 10).members.size() == 201);
  CHECK(p.eps_active_set({0, 0, 0}, 0).members.size() == 201);
}

TEST_CASE("property: eps-active sets are nested") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Problem p = cqtest::from_text(cqtest::random_polynomial_problem(seed));
    const auto g = p.eval_G(p.point()).g;
    const std::vector<double> eps = {0.0, 1e-8, 1e-4, 1e-2, 0.1, 0.5, 1.0, 5.0};
    for (std::size_t a = 0; a < eps.size(); ++a)
      for (std::size_t b = a; b < eps.size(); ++b)
        CHECK(subset(model::active_positions(g, eps[a]), model::active_positions(g, eps[b])));
  }
}

TEST_CASE("property: analytic and finite-difference Jacobians agree") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::string text = cqtest::random_polynomial_problem(seed);
    const Problem p = cqtest::from_text(text);
    const auto b = p.jacobians_at(p.point());
    INFO(text);
    CHECK(b.fd_discrepancy <= model::kFdReliability);
    CHECK(b.reliable);
  }
}

TEST_CASE("property: k_violation is zero exactly on feasible points") {
  const Problem p = cqtest::from_text(kR3Text);
  for (double x3 : {-2.0, -1e-3, 0.0}) CHECK(p.eval_G({0, 0, x3}).k_violation == 0.0);
  for (double x3 : {1e-3, 1.0}) CHECK(p.eval_G({0, 0, x3}).k_violation > 1e-10);
  CHECK(p.eval_G({1e-3, -1e-3, -1}).k_violation > 1e-10);
}

TEST_CASE("objective override keeps constraints") {
  const Problem p = cqtest::from_text(kR3Text).with_objective("x3");
  CHECK(p.jacobians_at({0, 0, 0}).grad_f == Vector{0, 0, 1});
  CHECK(p.n_indices() == 201);
  CHECK_THROWS_AS(cqtest::from_text(kR3Text).with_objective("x1 +"), Error);
}
