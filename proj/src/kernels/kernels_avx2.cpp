// Built with -mavx2 -mfma. Only reached after the dispatcher has confirmed
// CPU support.

#include <immintrin.h>

#include <cmath>
#include <limits>

#include "cqcert/kernels.hpp"

namespace cqcert::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double hmax(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(m, _mm_unpackhi_pd(m, m)));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  if (i + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    i += 4;
  }
  double sum = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  if (cols >= 4) {
    for (std::size_t r = 0; r < rows; ++r) y[r] = dot(a + r * cols, x, cols);
    return;
  }
  // Narrow matrices (the common n <= 3 case): four rows per vector.
  std::size_t r = 0;
  for (; r + 4 <= rows; r += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t j = 0; j < cols; ++j) {
      const __m256d col = _mm256_set_pd(a[(r + 3) * cols + j], a[(r + 2) * cols + j],
                                        a[(r + 1) * cols + j], a[r * cols + j]);
      acc = _mm256_fmadd_pd(col, _mm256_set1_pd(x[j]), acc);
    }
    _mm256_storeu_pd(y + r, acc);
  }
  for (; r < rows; ++r) {
    double sum = 0.0;
    for (std::size_t j = 0; j < cols; ++j) sum += a[r * cols + j] * x[j];
    y[r] = sum;
  }
}

double max_element(const double* v, std::size_t n) {
  double best = -std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  if (n >= 4) {
    __m256d m = _mm256_loadu_pd(v);
    for (i = 4; i + 4 <= n; i += 4) m = _mm256_max_pd(m, _mm256_loadu_pd(v + i));
    best = hmax(m);
  }
  for (; i < n; ++i)
    if (v[i] > best) best = v[i];
  return best;
}

double max_abs(const double* v, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, _mm256_andnot_pd(sign, _mm256_loadu_pd(v + i)));
  double best = hmax(m);
  for (; i < n; ++i) {
    const double a = std::fabs(v[i]);
    if (a > best) best = a;
  }
  return best;
}

}  // namespace cqcert::kernels::avx2
