#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cqcert/model/problem_file.hpp"

namespace cqcert::cli {

/// Exit codes of run_command.
enum ExitCode : int {
  kExitHolds = 0,
  kExitFails = 1,
  kExitInconclusive = 2,
  kExitInputError = 3,
};

struct BuiltinExample {
  std::string_view name;
  std::string_view summary;
  std::string_view text;  // problem file
};

std::span<const BuiltinExample> builtin_examples();

/// nullptr when unknown.
const BuiltinExample* find_builtin(std::string_view name);

/// "example://<name>" resolves to a built-in; anything else is a file path.
model::ProblemSpec resolve_problem(std::string_view source);

/// Runs one subcommand. `args` excludes the program name.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cqcert::cli
