#include "cqcert/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

#include "cqcert/error.hpp"

namespace cqcert::kernels {

namespace {

struct Table {
  Backend backend;
  double (*dot)(const double*, const double*, std::size_t);
  void (*gemv)(const double*, std::size_t, std::size_t, const double*, double*);
  double (*max_element)(const double*, std::size_t);
  double (*max_abs)(const double*, std::size_t);
};

constexpr Table kScalar{Backend::Scalar, scalar::dot, scalar::gemv, scalar::max_element,
                        scalar::max_abs};
#if defined(CQCERT_HAVE_AVX2)
constexpr Table kAvx2{Backend::Avx2, avx2::dot, avx2::gemv, avx2::max_element, avx2::max_abs};
#endif

bool cpu_has_avx2() noexcept {
#if defined(CQCERT_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Table* initial_table() {
  const char* forced = std::getenv("CQCERT_KERNELS");
  if (forced != nullptr && std::string(forced) == "scalar") return &kScalar;
#if defined(CQCERT_HAVE_AVX2)
  if (cpu_has_avx2()) return &kAvx2;
#endif
  return &kScalar;
}

const Table*& current() {
  static const Table* table = initial_table();
  return table;
}

}  // namespace

std::string_view backend_name(Backend b) noexcept {
  return b == Backend::Avx2 ? "avx2" : "scalar";
}

bool backend_available(Backend b) noexcept {
  return b == Backend::Scalar || cpu_has_avx2();
}

Backend active_backend() noexcept { return current()->backend; }

void select_backend(Backend b) {
  if (!backend_available(b))
    throw std::invalid_argument("kernel backend not available: " + std::string(backend_name(b)));
#if defined(CQCERT_HAVE_AVX2)
  current() = b == Backend::Avx2 ? &kAvx2 : &kScalar;
#else
  current() = &kScalar;
#endif
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
  return current()->dot(a.data(), b.data(), a.size());
}

void gemv(std::span<const double> a, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> y) {
  if (a.size() != rows * cols || x.size() != cols || y.size() != rows)
    throw DimensionError("gemv: dimension mismatch");
  current()->gemv(a.data(), rows, cols, x.data(), y.data());
}

double max_element(std::span<const double> v) { return current()->max_element(v.data(), v.size()); }

double max_abs(std::span<const double> v) { return current()->max_abs(v.data(), v.size()); }

}  // namespace cqcert::kernels
