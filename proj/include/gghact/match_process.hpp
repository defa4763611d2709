#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "gghact/error.hpp"
#include "gghact/numerics/dense.hpp"
#include "gghact/numerics/normal.hpp"
#include "gghact/numerics/tridiag.hpp"

namespace gghact {

/// Match quality drawn by a single on meeting a partner: N(mu_s, sigma_s2).
struct SinglesDraw {
  double mu_s = -4.252;
  double sigma_s2 = 8.063;

  void validate() const {
    if (!(sigma_s2 > 0.0)) fail(ErrorCode::InvalidParameter, "sigma_s2 must be > 0");
  }
  double sd() const { return std::sqrt(sigma_s2); }
  double cdf(double b) const { return num::normal_cdf(b, mu_s, sd()); }
  double pdf(double b) const { return num::normal_pdf(b, mu_s, sd()); }
};

/// Discrete-time match-quality law of motion for married couples:
/// b' = (1 - rho) mu_m + rho b + sigma_m sqrt(1 - rho^2) xi.
struct Ar1Process {
  double mu_m = 0.521;
  double sigma_m2 = 0.680;
  double rho_ar = 0.896;

  void validate() const {
    if (!(sigma_m2 > 0.0)) fail(ErrorCode::InvalidParameter, "sigma_m2 must be > 0");
    if (!(std::abs(rho_ar) < 1.0)) fail(ErrorCode::InvalidParameter, "|rho_ar| must be < 1");
  }
  double sd() const { return std::sqrt(sigma_m2); }
  double conditional_mean(double b) const { return (1.0 - rho_ar) * mu_m + rho_ar * b; }
  double innovation_sd() const { return sd() * std::sqrt(1.0 - rho_ar * rho_ar); }
};

/// Continuous-time law of motion: db = eta (mu_m - b) dt + sigma_m sqrt(2 eta) dB.
/// Its stationary law is N(mu_m, sigma_m2).
struct OuProcess {
  double mu_m = 0.951;
  double sigma_m2 = 0.83;
  double eta = 0.113;

  void validate() const {
    if (!(sigma_m2 > 0.0)) fail(ErrorCode::InvalidParameter, "sigma_m2 must be > 0");
    if (!(eta > 0.0)) fail(ErrorCode::InvalidParameter, "eta must be > 0");
  }
  double sd() const { return std::sqrt(sigma_m2); }
};

/// Uniform grid b_0 < ... < b_{n-1} with spacing db.
struct Grid {
  std::vector<double> points;
  double db = 0.0;

  std::size_t size() const noexcept { return points.size(); }
  double front() const { return points.front(); }
  double back() const { return points.back(); }
  double operator[](std::size_t i) const { return points[i]; }
};

inline Grid uniform_grid(double lo, double hi, std::size_t n) {
  if (n < 3) fail(ErrorCode::InvalidInput, "grid needs at least 3 points");
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    fail(ErrorCode::InvalidInput, "degenerate grid interval [" + std::to_string(lo) + ", " +
                                      std::to_string(hi) + "]");
  }
  Grid g;
  g.db = (hi - lo) / static_cast<double>(n - 1);
  g.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) g.points[i] = lo + static_cast<double>(i) * g.db;
  return g;
}

/// Uniform grid over [min(center - n_std sigma, lo_extend), center + n_std sigma].
inline Grid build_grid(double center, double sigma, double n_std, std::size_t n,
                       double lo_extend = std::numeric_limits<double>::infinity()) {
  if (!(sigma > 0.0) || !(n_std > 0.0)) {
    fail(ErrorCode::InvalidInput, "grid needs positive sigma and n_std");
  }
  const double lo = std::min(center - n_std * sigma, lo_extend);
  return uniform_grid(lo, center + n_std * sigma, n);
}

/// Grid wide enough to carry both the singles draw and the married AR(1) law (4 sd each side).
inline Grid dt_grid(const SinglesDraw& singles, const Ar1Process& ar1, std::size_t n) {
  constexpr double kSpan = 4.0;
  const double lo = std::min(singles.mu_s - kSpan * singles.sd(), ar1.mu_m - kSpan * ar1.sd());
  const double hi = std::max(singles.mu_s + kSpan * singles.sd(), ar1.mu_m + kSpan * ar1.sd());
  return uniform_grid(lo, hi, n);
}

namespace detail {
/// Bin probabilities of N(mu, sd) over midpoint cells; end bins absorb the tails and the last bin
/// takes the remainder so the vector sums to one.
inline void bin_probabilities(const Grid& grid, double mu, double sd, std::span<double> out) {
  const std::size_t n = grid.size();
  double prev = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double edge = grid[i] + 0.5 * grid.db;
    const double c = num::normal_cdf(edge, mu, sd);
    out[i] = c - prev;
    total += out[i];
    prev = c;
  }
  out[n - 1] = 1.0 - total;
}
}  // namespace detail

/// Row-stochastic Tauchen matrix: G(j, i) = Pr(b' in bin i | b = b_j).
inline num::DenseMatrix tauchen(const Ar1Process& ar1, const Grid& grid) {
  ar1.validate();
  const std::size_t n = grid.size();
  num::DenseMatrix g(n, n);
  const double sd = ar1.innovation_sd();
  for (std::size_t j = 0; j < n; ++j) {
    detail::bin_probabilities(grid, ar1.conditional_mean(grid[j]), sd, g.row(j));
  }
  return g;
}

struct SinglesDiscretization {
  std::vector<double> probs;
  double tail_mass = 0.0;     // mass of the draw law outside [b_0, b_{n-1}]
  bool tail_warning = false;  // tail_mass > kTailMassLimit: grid too narrow for the draw law
};

inline constexpr double kTailMassLimit = 0.01;

/// Probability vector F with F_i = Pr(b in bin i) under the singles draw law.
inline SinglesDiscretization discretize_singles(const SinglesDraw& f, const Grid& grid) {
  f.validate();
  SinglesDiscretization out;
  out.probs.resize(grid.size());
  detail::bin_probabilities(grid, f.mu_s, f.sd(), out.probs);
  out.tail_mass = f.cdf(grid.front()) + (1.0 - f.cdf(grid.back()));
  out.tail_warning = out.tail_mass > kTailMassLimit;
  return out;
}

/// Upwind finite-difference generator of the OU process on a uniform grid.
///
/// Interior rows: upper = d+/db + D, lower = -d-/db + D, diag = -(upper + lower), with drift
/// d_i = eta (mu_m - b_i) and D = eta sigma_m2 / db^2. The end rows are reflecting: row 0 keeps only
/// its upward rate and row n-1 only its downward rate, so every row sums to zero.
inline num::TriDiag ou_generator(const OuProcess& ou, const Grid& grid) {
  ou.validate();
  const std::size_t n = grid.size();
  if (n < 3) fail(ErrorCode::InvalidInput, "OU generator needs at least 3 grid points");
  const double diffusion = ou.eta * ou.sigma_m2 / (grid.db * grid.db);
  num::TriDiag a(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double drift = ou.eta * (ou.mu_m - grid[i]);
    const double up = (i + 1 < n) ? std::max(drift, 0.0) / grid.db + diffusion : 0.0;
    const double down = (i > 0) ? -std::min(drift, 0.0) / grid.db + diffusion : 0.0;
    if (i + 1 < n) a.upper[i] = up;
    if (i > 0) a.lower[i - 1] = down;
    a.diag[i] = -(up + down);
  }
  return a;
}

struct CtRatesMapping {
  double nu = 0.0;
  double rho_tilde = 0.0;
  double eta_naive = 0.0;
};

/// Standard discrete-to-continuous rate mapping: nu = -log(1-delta)/dt,
/// rho_tilde = -log(beta_tilde)/dt, eta = -log(rho_ar)/dt.
inline CtRatesMapping map_dt_to_ct(double delta, double beta_tilde, double rho_ar, double dt) {
  if (!(delta > 0.0 && delta < 1.0)) fail(ErrorCode::InvalidParameter, "delta must lie in (0,1)");
  if (!(beta_tilde > 0.0 && beta_tilde < 1.0)) {
    fail(ErrorCode::InvalidParameter, "beta_tilde must lie in (0,1)");
  }
  if (!(rho_ar > 0.0 && rho_ar < 1.0)) fail(ErrorCode::InvalidParameter, "rho_ar must lie in (0,1)");
  if (!(dt > 0.0)) fail(ErrorCode::InvalidParameter, "dt must be > 0");
  return {-std::log1p(-delta) / dt, -std::log(beta_tilde) / dt, -std::log(rho_ar) / dt};
}

/// Exit, discounting and meeting rates in both timings.
struct Demographics {
  double delta = 0.0;       // per-period exit probability
  double nu = 0.0;          // exit hazard
  double beta_tilde = 0.0;  // pure discount factor
  double beta = 0.0;        // beta_tilde (1 - delta)
  double rho_tilde = 0.0;   // pure discount rate
  double rho = 0.0;         // rho_tilde + nu
  double lambda = 0.0;      // meeting rate
  double dt = 1.0;          // period length
};

inline Demographics make_demographics(double delta, double beta_tilde, double lambda, double dt) {
  if (!(delta > 0.0 && delta < 1.0)) fail(ErrorCode::InvalidParameter, "delta must lie in (0,1)");
  if (!(beta_tilde > 0.0 && beta_tilde < 1.0)) {
    fail(ErrorCode::InvalidParameter, "beta_tilde must lie in (0,1)");
  }
  if (!(lambda >= 0.0)) fail(ErrorCode::InvalidParameter, "lambda must be >= 0");
  if (!(dt > 0.0)) fail(ErrorCode::InvalidParameter, "dt must be > 0");
  Demographics d;
  d.delta = delta;
  d.beta_tilde = beta_tilde;
  d.beta = beta_tilde * (1.0 - delta);
  d.nu = -std::log1p(-delta) / dt;
  d.rho_tilde = -std::log(beta_tilde) / dt;
  d.rho = d.rho_tilde + d.nu;
  d.lambda = lambda;
  d.dt = dt;
  return d;
}

}  // namespace gghact
