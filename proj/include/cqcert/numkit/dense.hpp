#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace cqcert::numkit {

using Vector = std::vector<double>;

/// Row-major dense matrix with finite entries.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  /// Zero matrix.
  DenseMatrix(std::size_t rows, std::size_t cols);
  /// Throws DimensionError when entries.size() != rows*cols and
  /// NumericError when an entry is not finite.
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static DenseMatrix from_columns(std::size_t rows, const std::vector<Vector>& columns);
  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  Vector column(std::size_t c) const;
  const std::vector<double>& entries() const noexcept { return data_; }

  DenseMatrix transposed() const;
  /// A x.
  Vector apply(std::span<const double> x) const;
  /// A^T y.
  Vector apply_transposed(std::span<const double> y) const;
  DenseMatrix operator*(const DenseMatrix& rhs) const;
  /// Rows selected by index, in the given order.
  DenseMatrix select_rows(std::span<const std::size_t> rows) const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double norm2(std::span<const double> v);
double norm_inf(std::span<const double> v);
Vector axpy(double alpha, std::span<const double> x, std::span<const double> y);  // alpha*x + y
Vector scaled(double alpha, std::span<const double> x);

/// Groups the selected rows whose entries agree within `tol` (max norm) with
/// the group's first row. Groups appear in order of their first member; each
/// group lists row indices in increasing order.
std::vector<std::vector<std::size_t>> group_equal_rows(const DenseMatrix& a,
                                                       std::span<const std::size_t> rows,
                                                       double tol);

}  // namespace cqcert::numkit
