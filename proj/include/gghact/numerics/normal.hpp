#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "gghact/error.hpp"

namespace gghact::num {

namespace detail {
inline void check_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    fail(ErrorCode::InvalidParameter, "normal distribution needs sigma > 0, got " +
                                          std::to_string(sigma));
  }
}
}  // namespace detail

inline double normal_cdf(double x, double mu, double sigma) {
  detail::check_sigma(sigma);
  return 0.5 * std::erfc(-(x - mu) / (sigma * std::numbers::sqrt2));
}

inline double normal_pdf(double x, double mu, double sigma) {
  detail::check_sigma(sigma);
  const double u = (x - mu) / sigma;
  return std::exp(-0.5 * u * u) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

}  // namespace gghact::num
