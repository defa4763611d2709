#pragma once

#include <cstddef>
#include <vector>

#include "gghact/numerics/tridiag.hpp"

namespace oracle {

/// Stationary density of a birth-death generator from detailed balance
/// pi_{i+1} = pi_i up_i / down_{i+1}, normalized so that sum pi db = 1.
inline std::vector<double> birth_death_density(const gghact::num::TriDiag& a, double db) {
  const std::size_t n = a.size();
  std::vector<long double> pi(n);
  pi[0] = 1.0L;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    pi[i + 1] = pi[i] * a.upper[i] / a.lower[i];
  }
  long double total = 0.0L;
  for (long double v : pi) total += v;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<double>(pi[i] / (total * db));
  return out;
}

}  // namespace oracle
