#pragma once

#include <string>
#include <string_view>

#include "cqcert/cli/cli.hpp"
#include "cqcert/model/problem.hpp"
#include "cqcert/model/problem_file.hpp"

namespace cqtest {

inline cqcert::model::Problem builtin(std::string_view name) {
  return cqcert::model::Problem(cqcert::cli::resolve_problem("example://" + std::string(name)));
}

inline cqcert::model::Problem from_text(std::string_view text) {
  return cqcert::model::Problem(cqcert::model::load_problem(text));
}

}  // namespace cqtest
