#include <algorithm>
#include <array>

#include "cqcert/cli/cli.hpp"
#include "cqcert/error.hpp"

namespace cqcert::cli {

namespace {

constexpr std::string_view kScheme = "example://";

constexpr std::string_view kR3 = R"(# Non-surjective equalities with a continuum of inequalities in R^3.
name = "r3-gpmfcq"
dim = 3
objective = "x1 + x2 - x3"
equality = ["x1^2", "x1 + x2", "x1^3 + x2"]
inequality = "t*x1^2 + x1 - x2 + x3"
index_set = { type = "interval", lo = 0, hi = 1, open_lo = true, open_hi = true, grid = 201 }
point = [0, 0, 0]
)";

constexpr std::string_view kRank = R"(# Rank-deficient equality map in R^2; the base point is not feasible.
name = "rank-r2"
dim = 2
objective = "x2"
equality = ["x1^2", "x2", "x1^3 + x2"]
point = [1, 0]
)";

constexpr std::string_view kOpposed = R"(# Opposed active gradients: no strictly feasible direction.
name = "opposed"
dim = 1
objective = "x1"
inequality_list = ["x1", "-x1"]
point = [0]
)";

constexpr std::string_view kInactive = R"(# Surjective equality, strictly inactive inequalities.
name = "surjective-inactive"
dim = 2
objective = "x1 + x2"
equality = ["x1 + x2"]
inequality_list = ["x1 - 1", "x2 - 1"]
point = [0, 0]
)";

constexpr std::string_view kFree = R"(# No constraints at all.
name = "unconstrained"
dim = 2
objective = "x1^2 + x2^2"
point = [0, 0]
)";

constexpr std::array<BuiltinExample, 5> kExamples = {{
    {"r3-gpmfcq", "GPMFCQ holds, PMFCQ fails (DH rank 2 of 3)", kR3},
    {"rank-r2", "rank-2 Jacobian of a map R^2 -> R^3 at (1, 0)", kRank},
    {"opposed", "negative control: g1 = x1, g2 = -x1", kOpposed},
    {"surjective-inactive", "surjective DH, inactive inequalities", kInactive},
    {"unconstrained", "no constraints; everything holds vacuously", kFree},
}};

}  // namespace

std::span<const BuiltinExample> builtin_examples() { return kExamples; }

const BuiltinExample* find_builtin(std::string_view name) {
  const auto it = std::find_if(kExamples.begin(), kExamples.end(),
                               [&](const BuiltinExample& e) { return e.name == name; });
  return it == kExamples.end() ? nullptr : &*it;
}

model::ProblemSpec resolve_problem(std::string_view source) {
  if (source.substr(0, kScheme.size()) == kScheme) {
    const std::string_view name = source.substr(kScheme.size());
    const BuiltinExample* e = find_builtin(name);
    if (e == nullptr) throw Error("unknown built-in example '" + std::string(name) + "'");
    return model::load_problem(e->text);
  }
  return model::load_problem_file(std::filesystem::path(std::string(source)));
}

}  // namespace cqcert::cli
