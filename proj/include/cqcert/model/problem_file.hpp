#pragma once

// Problem files: a small TOML subset.
//
//   dim = 3
//   objective = "x1 + x2 - x3"
//   equality = ["x1^2", "x1 + x2", "x1^3 + x2"]
//   inequality = "t*x1^2 + x1 - x2 + x3"        # or inequality_list = [...]
//   index_set = { type = "interval", lo = 0, hi = 1, open_lo = true, open_hi = true }
//   point = [0, 0, 0]
//
// Tables may also be written as a [index_set] section. Strings are double
// quoted; arrays may span lines; '#' starts a comment. Unknown and repeated
// keys are errors.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cqcert/expr/expr.hpp"
#include "cqcert/numkit/dense.hpp"

namespace cqcert::model {

inline constexpr int kDefaultGridPoints = 201;

enum class IndexKind { Finite, Interval };

struct IndexSetDesc {
  IndexKind kind = IndexKind::Finite;
  std::vector<double> values;  // finite: strictly increasing
  double lo = 0.0;
  double hi = 1.0;
  bool open_lo = false;
  bool open_hi = false;
  int grid_points = kDefaultGridPoints;

  /// Inset applied to open interval ends: (hi - lo) / (10 * grid_points).
  double inset() const;
  /// Sampled t-values, strictly increasing.
  std::vector<double> grid() const;
  /// Throws DimensionError when the descriptor is inconsistent.
  void validate() const;
};

enum class FamilyKind { None, Parametric, List };

struct ProblemSpec {
  std::string name;
  int n = 0;
  expr::Expr objective;
  std::vector<expr::Expr> equalities;
  FamilyKind family_kind = FamilyKind::None;
  expr::Expr family;                    // Parametric: g(x, t)
  std::vector<expr::Expr> inequality_list;  // List: g_k(x)
  IndexSetDesc index_set;
  numkit::Vector point;

  // Source text, echoed into reports.
  std::string objective_text = "0";
  std::vector<std::string> equality_texts;
  std::vector<std::string> inequality_texts;
};

/// Parses and validates a problem file. Throws FormatError (with line and
/// column) for syntax, schema and expression errors, DimensionError for
/// inconsistent sizes.
ProblemSpec load_problem(std::string_view text);

/// Reads a file and calls load_problem. Throws Error when it cannot be read.
ProblemSpec load_problem_file(const std::filesystem::path& path);

}  // namespace cqcert::model
