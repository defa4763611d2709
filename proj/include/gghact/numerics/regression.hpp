#pragma once

#include <cmath>
#include <cstddef>
#include <span>

#include "gghact/error.hpp"

namespace gghact::num {

/// OLS slope of log(ys) on log(xs).
inline double loglog_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    fail(ErrorCode::InvalidInput, "loglog_slope needs two equal-length series of length >= 2");
  }
  const auto n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) {
      fail(ErrorCode::InvalidInput, "loglog_slope needs strictly positive entries");
    }
    mx += std::log(xs[i]);
    my += std::log(ys[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = std::log(xs[i]) - mx;
    sxy += dx * (std::log(ys[i]) - my);
    sxx += dx * dx;
  }
  if (!(sxx > 0.0)) fail(ErrorCode::InvalidInput, "loglog_slope: xs are all equal");
  return sxy / sxx;
}

}  // namespace gghact::num
