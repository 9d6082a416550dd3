#include "cqcert/numkit/dense.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cqcert/error.hpp"
#include "cqcert/kernels.hpp"

namespace cqcert::numkit {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows * cols)
    throw DimensionError("matrix entries: expected " + std::to_string(rows * cols) + ", got " +
                         std::to_string(data_.size()));
  for (double v : data_)
    if (!std::isfinite(v)) throw NumericError("matrix entry is not finite");
}

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw DimensionError("ragged matrix rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return DenseMatrix(r, c, std::move(data));
}

DenseMatrix DenseMatrix::from_columns(std::size_t rows, const std::vector<Vector>& columns) {
  DenseMatrix m(rows, columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].size() != rows) throw DimensionError("column length mismatch");
    for (std::size_t i = 0; i < rows; ++i) m(i, j) = columns[j][i];
  }
  return m;
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vector DenseMatrix::column(std::size_t c) const {
  Vector v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, c);
  return v;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Vector DenseMatrix::apply(std::span<const double> x) const {
  if (x.size() != cols_) throw DimensionError("apply: vector length mismatch");
  Vector y(rows_);
  kernels::gemv(data_, rows_, cols_, x, y);
  return y;
}

Vector DenseMatrix::apply_transposed(std::span<const double> y) const {
  if (y.size() != rows_) throw DimensionError("apply_transposed: vector length mismatch");
  Vector x(cols_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) x[j] += (*this)(i, j) * y[i];
  return x;
}

DenseMatrix DenseMatrix::operator*(const DenseMatrix& rhs) const {
  if (cols_ != rhs.rows_) throw DimensionError("matrix product: inner dimension mismatch");
  DenseMatrix out(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const double a = (*this)(i, k);
      if (a == 0.0) continue;
      for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
    }
  return out;
}

DenseMatrix DenseMatrix::select_rows(std::span<const std::size_t> rows) const {
  DenseMatrix out(rows.size(), cols_);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] >= rows_) throw DimensionError("select_rows: index out of range");
    const auto src = row(rows[k]);
    std::copy(src.begin(), src.end(), out.row(k).begin());
  }
  return out;
}

double norm2(std::span<const double> v) { return std::sqrt(kernels::dot(v, v)); }

double norm_inf(std::span<const double> v) { return kernels::max_abs(v); }

Vector axpy(double alpha, std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("axpy: length mismatch");
  Vector out(y.begin(), y.end());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] += alpha * x[i];
  return out;
}

Vector scaled(double alpha, std::span<const double> x) {
  Vector out(x.begin(), x.end());
  for (double& v : out) v *= alpha;
  return out;
}

std::vector<std::vector<std::size_t>> group_equal_rows(const DenseMatrix& a,
                                                       std::span<const std::size_t> rows,
                                                       double tol) {
  std::vector<std::size_t> order(rows.begin(), rows.end());
  for (std::size_t r : order)
    if (r >= a.rows()) throw DimensionError("group_equal_rows: index out of range");
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    const auto ri = a.row(i);
    const auto rj = a.row(j);
    return std::lexicographical_compare(ri.begin(), ri.end(), rj.begin(), rj.end());
  });
  // Lexicographic order keeps near-equal rows close together; comparing
  // against the last few groups catches reorderings from sub-tol differences.
  // A missed merge only duplicates a generator.
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> open;
  for (std::size_t r : order) {
    const auto row_r = a.row(r);
    bool placed = false;
    for (std::size_t g : open) {
      const auto rep = a.row(groups[g].front());
      bool same = true;
      for (std::size_t c = 0; c < a.cols() && same; ++c) same = std::fabs(rep[c] - row_r[c]) <= tol;
      if (same) {
        groups[g].push_back(r);
        placed = true;
        break;
      }
    }
    if (!placed) {
      groups.push_back({r});
      open.push_back(groups.size() - 1);
      if (open.size() > 8) open.erase(open.begin());
    }
  }
  for (auto& g : groups) std::sort(g.begin(), g.end());
  std::sort(groups.begin(), groups.end(),
            [](const auto& x, const auto& y) { return x.front() < y.front(); });
  return groups;
}

}  // namespace cqcert::numkit
