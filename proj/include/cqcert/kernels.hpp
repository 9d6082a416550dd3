#pragma once

// Data-parallel inner loops: dot products, row-major matrix-vector products
// and max reductions. Each routine has a scalar reference implementation and,
// on x86-64 builds, an AVX2/FMA variant. The variant is chosen once at
// startup from the CPU feature flags; setting CQCERT_KERNELS=scalar in the
// environment forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace cqcert::kernels {

enum class Backend { Scalar, Avx2 };

std::string_view backend_name(Backend b) noexcept;
bool backend_available(Backend b) noexcept;
Backend active_backend() noexcept;

/// Switches the process-wide backend. Not thread-safe; intended for tests and
/// benchmarks. Throws std::invalid_argument when the backend is unavailable.
void select_backend(Backend b);

double dot(std::span<const double> a, std::span<const double> b);

/// y = A x with A row-major (rows x cols).
void gemv(std::span<const double> a, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> y);

/// Largest element; -inf for an empty span.
double max_element(std::span<const double> v);

/// Largest |v_i|; 0 for an empty span.
double max_abs(std::span<const double> v);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
double max_element(const double* v, std::size_t n);
double max_abs(const double* v, std::size_t n);
}  // namespace scalar

namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
double max_element(const double* v, std::size_t n);
double max_abs(const double* v, std::size_t n);
}  // namespace avx2

}  // namespace cqcert::kernels
