#include <cmath>
#include <limits>

#include "cqcert/kernels.hpp"

namespace cqcert::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot(a + r * cols, x, cols);
}

double max_element(const double* v, std::size_t n) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i)
    if (v[i] > best) best = v[i];
  return best;
}

double max_abs(const double* v, std::size_t n) {
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::fabs(v[i]);
    if (a > best) best = a;
  }
  return best;
}

}  // namespace cqcert::kernels::scalar
