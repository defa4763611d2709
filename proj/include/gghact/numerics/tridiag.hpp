#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gghact/error.hpp"

namespace gghact::num {

/// Tridiagonal matrix stored as three bands.
/// lower[i-1] = M(i, i-1), diag[i] = M(i, i), upper[i] = M(i, i+1).
struct TriDiag {
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;

  TriDiag() = default;
  explicit TriDiag(std::size_t n)
      : lower(n > 0 ? n - 1 : 0, 0.0), diag(n, 0.0), upper(n > 0 ? n - 1 : 0, 0.0) {}
  TriDiag(std::vector<double> lo, std::vector<double> d, std::vector<double> up)
      : lower(std::move(lo)), diag(std::move(d)), upper(std::move(up)) {
    validate();
  }

  std::size_t size() const noexcept { return diag.size(); }

  void validate() const {
    const std::size_t n = diag.size();
    if (n == 0 || lower.size() != n - 1 || upper.size() != n - 1) {
      fail(ErrorCode::InvalidInput, "tridiagonal band lengths inconsistent with N=" +
                                        std::to_string(n));
    }
  }

  double row_sum(std::size_t i) const {
    double s = diag[i];
    if (i > 0) s += lower[i - 1];
    if (i + 1 < size()) s += upper[i];
    return s;
  }

  /// Bytes held by the three bands.
  std::size_t bytes() const noexcept {
    return (lower.capacity() + diag.capacity() + upper.capacity()) * sizeof(double);
  }

  TriDiag transposed() const { return TriDiag(upper, diag, lower); }

  /// Principal submatrix on rows/cols [first, n).
  TriDiag trailing(std::size_t first) const {
    const std::size_t n = size();
    if (first >= n) fail(ErrorCode::InvalidInput, "trailing block start out of range");
    return TriDiag(std::vector<double>(lower.begin() + static_cast<std::ptrdiff_t>(first),
                                       lower.end()),
                   std::vector<double>(diag.begin() + static_cast<std::ptrdiff_t>(first),
                                       diag.end()),
                   std::vector<double>(upper.begin() + static_cast<std::ptrdiff_t>(first),
                                       upper.end()));
  }
};

/// y = M x
inline std::vector<double> multiply(const TriDiag& m, std::span<const double> x) {
  const std::size_t n = m.size();
  if (x.size() != n) fail(ErrorCode::InvalidInput, "tridiagonal multiply: size mismatch");
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = m.diag[i] * x[i];
    if (i > 0) acc += m.lower[i - 1] * x[i - 1];
    if (i + 1 < n) acc += m.upper[i] * x[i + 1];
    y[i] = acc;
  }
  return y;
}

/// Thomas-algorithm LU factors, computed once and reused for any number of solves.
class TriDiagFactorization {
 public:
  static constexpr double kPivotFloor = 1e-14;

  explicit TriDiagFactorization(const TriDiag& m) : lower_(m.lower) {
    m.validate();
    const std::size_t n = m.size();
    inv_pivot_.resize(n);
    upper_scaled_.resize(n > 0 ? n - 1 : 0);
    double pivot = m.diag[0];
    for (std::size_t i = 0;; ++i) {
      if (!(std::abs(pivot) >= kPivotFloor)) {
        fail(ErrorCode::SingularMatrix,
             "pivot " + std::to_string(pivot) + " at row " + std::to_string(i));
      }
      inv_pivot_[i] = 1.0 / pivot;
      if (i + 1 == n) break;
      upper_scaled_[i] = m.upper[i] * inv_pivot_[i];
      pivot = m.diag[i + 1] - m.lower[i] * upper_scaled_[i];
    }
  }

  std::size_t size() const noexcept { return inv_pivot_.size(); }

  std::size_t bytes() const noexcept {
    return (lower_.capacity() + inv_pivot_.capacity() + upper_scaled_.capacity()) *
           sizeof(double);
  }

  /// Solves in place; O(N).
  void solve_in_place(std::span<double> x) const {
    const std::size_t n = size();
    if (x.size() != n) fail(ErrorCode::InvalidInput, "tridiagonal solve: size mismatch");
    x[0] *= inv_pivot_[0];
    for (std::size_t i = 1; i < n; ++i) {
      x[i] = (x[i] - lower_[i - 1] * x[i - 1]) * inv_pivot_[i];
    }
    for (std::size_t i = n - 1; i-- > 0;) {
      x[i] -= upper_scaled_[i] * x[i + 1];
    }
  }

  std::vector<double> solve(std::span<const double> rhs) const {
    std::vector<double> x(rhs.begin(), rhs.end());
    solve_in_place(x);
    return x;
  }

 private:
  std::vector<double> lower_;
  std::vector<double> inv_pivot_;
  std::vector<double> upper_scaled_;
};

inline TriDiagFactorization tridiag_factor(const TriDiag& m) { return TriDiagFactorization(m); }

}  // namespace gghact::num
