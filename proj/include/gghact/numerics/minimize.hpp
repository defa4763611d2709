#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "gghact/error.hpp"

namespace gghact::num {

/// Golden-section search for a local minimizer of f on [lo, hi].
/// Terminates once the bracket is narrower than tol.
template <class F>
double minimize_scalar(F&& f, double lo, double hi, double tol) {
  if (!(lo < hi)) fail(ErrorCode::InvalidInput, "minimize_scalar needs lo < hi");
  if (!(tol > 0.0)) fail(ErrorCode::InvalidInput, "minimize_scalar needs tol > 0");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto eval = [&](double x) {
    const double v = f(x);
    if (!std::isfinite(v)) {
      fail(ErrorCode::NonFiniteObjective, "objective non-finite at x=" + std::to_string(x));
    }
    return v;
  };
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = eval(c);
  double fd = eval(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = eval(d);
    }
  }
  return fc <= fd ? c : d;
}

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  /// Best objective value after each iteration (index 0 is the initial simplex).
  std::vector<double> trace;
  /// Best point after each iteration, aligned with trace.
  std::vector<std::vector<double>> trace_points;
};

/// Nelder-Mead downhill simplex. The initial simplex is x0 plus scale[i] along axis i.
/// Converged when the largest vertex distance (inf-norm) from the best vertex is below tol.
/// Exhausting max_iter returns the best point with converged == false.
inline SimplexResult minimize_simplex(const std::function<double(std::span<const double>)>& f,
                                      std::span<const double> x0, std::span<const double> scale,
                                      double tol, std::size_t max_iter) {
  const std::size_t dim = x0.size();
  if (dim == 0 || scale.size() != dim) {
    fail(ErrorCode::InvalidInput, "minimize_simplex: x0 and scale dimensions disagree");
  }
  SimplexResult out;
  auto eval = [&](const std::vector<double>& x) {
    ++out.evaluations;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  std::vector<std::vector<double>> pts(dim + 1, std::vector<double>(x0.begin(), x0.end()));
  for (std::size_t i = 0; i < dim; ++i) pts[i + 1][i] += scale[i];
  std::vector<double> vals(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) vals[i] = eval(pts[i]);
  if (!std::isfinite(vals[0])) {
    fail(ErrorCode::NonFiniteObjective, "minimize_simplex: f not finite at x0");
  }

  std::vector<std::size_t> order(dim + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    std::vector<std::vector<double>> p2;
    std::vector<double> v2;
    for (auto k : order) {
      p2.push_back(pts[k]);
      v2.push_back(vals[k]);
    }
    pts = std::move(p2);
    vals = std::move(v2);
  };
  auto diameter = [&] {
    double d = 0.0;
    for (std::size_t i = 1; i <= dim; ++i)
      for (std::size_t k = 0; k < dim; ++k) d = std::max(d, std::abs(pts[i][k] - pts[0][k]));
    return d;
  };
  auto affine = [&](const std::vector<double>& c, const std::vector<double>& w, double t) {
    std::vector<double> r(dim);
    for (std::size_t k = 0; k < dim; ++k) r[k] = c[k] + t * (w[k] - c[k]);
    return r;
  };

  sort_simplex();
  out.trace.push_back(vals[0]);
  out.trace_points.push_back(pts[0]);

  while (out.iterations < max_iter) {
    if (diameter() < tol) {
      out.converged = true;
      break;
    }
    ++out.iterations;
    std::vector<double> centroid(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t k = 0; k < dim; ++k) centroid[k] += pts[i][k] / static_cast<double>(dim);

    const auto xr = affine(centroid, pts[dim], -1.0);
    const double fr = eval(xr);
    if (fr < vals[0]) {
      const auto xe = affine(centroid, pts[dim], -2.0);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[dim] = xe;
        vals[dim] = fe;
      } else {
        pts[dim] = xr;
        vals[dim] = fr;
      }
    } else if (fr < vals[dim - 1]) {
      pts[dim] = xr;
      vals[dim] = fr;
    } else {
      const bool outside = fr < vals[dim];
      const auto xc = outside ? affine(centroid, pts[dim], -0.5) : affine(centroid, pts[dim], 0.5);
      const double fc = eval(xc);
      if (fc < (outside ? fr : vals[dim])) {
        pts[dim] = xc;
        vals[dim] = fc;
      } else {
        for (std::size_t i = 1; i <= dim; ++i) {
          pts[i] = affine(pts[0], pts[i], 0.5);
          vals[i] = eval(pts[i]);
        }
      }
    }
    sort_simplex();
    out.trace.push_back(vals[0]);
    out.trace_points.push_back(pts[0]);
  }
  if (!out.converged && diameter() < tol) out.converged = true;
  out.x = pts[0];
  out.value = vals[0];
  return out;
}

}  // namespace gghact::num
