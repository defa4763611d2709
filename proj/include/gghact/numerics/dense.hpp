#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gghact/error.hpp"

namespace gghact::num {

/// Row-major dense matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }

  std::span<const double> data() const noexcept { return data_; }

  std::size_t bytes() const noexcept { return data_.capacity() * sizeof(double); }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// y = M x, one dot product per row.
inline void multiply_into(const DenseMatrix& m, std::span<const double> x, std::span<double> y) {
  if (x.size() != m.cols() || y.size() != m.rows()) {
    fail(ErrorCode::InvalidInput, "dense multiply: size mismatch");
  }
  const std::size_t cols = m.cols();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double* r = m.row(i).data();
    double acc = 0.0;
    for (std::size_t j = 0; j < cols; ++j) acc += r[j] * x[j];
    y[i] = acc;
  }
}

inline std::vector<double> multiply(const DenseMatrix& m, std::span<const double> x) {
  std::vector<double> y(m.rows());
  multiply_into(m, x, y);
  return y;
}

/// Gaussian elimination with partial pivoting. O(N^3); the matrix is taken by value.
inline std::vector<double> dense_solve(DenseMatrix a, std::span<const double> rhs) {
  const std::size_t n = a.rows();
  if (a.cols() != n) fail(ErrorCode::InvalidInput, "dense_solve: matrix not square");
  if (rhs.size() != n) fail(ErrorCode::InvalidInput, "dense_solve: rhs size mismatch");
  std::vector<double> x(rhs.begin(), rhs.end());
  if (n == 0) return x;

  double scale = 0.0;
  for (double v : a.data()) scale = std::max(scale, std::abs(v));
  const double tiny = std::max(scale, 1.0) * 1e-300;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(a(i, k)) > best) {
        best = std::abs(a(i, k));
        piv = i;
      }
    }
    if (!(best > tiny)) {
      fail(ErrorCode::SingularMatrix, "zero pivot in column " + std::to_string(k));
    }
    if (piv != k) {
      std::swap_ranges(a.row(k).begin(), a.row(k).end(), a.row(piv).begin());
      std::swap(x[k], x[piv]);
    }
    const double inv = 1.0 / a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double factor = a(i, k) * inv;
      if (factor == 0.0) continue;
      auto ri = a.row(i);
      auto rk = a.row(k);
      for (std::size_t j = k; j < n; ++j) ri[j] -= factor * rk[j];
      x[i] -= factor * x[k];
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    double acc = x[k];
    auto rk = a.row(k);
    for (std::size_t j = k + 1; j < n; ++j) acc -= rk[j] * x[j];
    x[k] = acc / a(k, k);
  }
  return x;
}

}  // namespace gghact::num
