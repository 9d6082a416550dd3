#pragma once

#include <cstdint>
#include <string>

namespace cqtest {

struct RandomProblemShape {
  int max_dim = 6;
  int max_equalities = 4;
  int max_degree = 4;
  int grid_points = 51;
};

/// Problem-file text for a seeded random polynomial problem: polynomial
/// objective and equalities, and either a t-dependent inequality family on an
/// interval or a finite inequality list. The base point is random in [-1, 1]^n.
std::string random_polynomial_problem(std::uint64_t seed, const RandomProblemShape& shape = {});

}  // namespace cqtest
