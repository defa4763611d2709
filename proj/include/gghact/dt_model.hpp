#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "gghact/error.hpp"
#include "gghact/match_process.hpp"
#include "gghact/numerics/dense.hpp"
#include "gghact/params.hpp"

namespace gghact {

struct VfiResult {
  std::vector<double> v;  // married value on the grid
  double w_single = 0.0;  // single value
  std::size_t iterations = 0;
  double residual = 0.0;
  std::vector<double> residual_history;  // sup-norm change per sweep
};

/// Value function iteration on
///   V = v2 + b + beta G max(V, W),   W = v1 + beta F'max(V, W),
/// updating V and W simultaneously from V0 = (v2 + b)/(1 - beta), W0 = v1/(1 - beta).
inline VfiResult solve_vfi(double beta, const Grid& grid, const num::DenseMatrix& g,
                           std::span<const double> f, double v1, double v2, double tol,
                           std::size_t max_iter) {
  const std::size_t n = grid.size();
  if (g.rows() != n || g.cols() != n || f.size() != n) {
    fail(ErrorCode::InvalidInput, "solve_vfi: G/F dimensions disagree with the grid");
  }
  if (!(beta >= 0.0 && beta < 1.0)) fail(ErrorCode::InvalidParameter, "beta must lie in [0,1)");

  VfiResult out;
  out.v.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.v[i] = (v2 + grid[i]) / (1.0 - beta);
  out.w_single = v1 / (1.0 - beta);

  std::vector<double> best(n);
  std::vector<double> cont(n);
  for (std::size_t it = 1; it <= max_iter; ++it) {
    const double w = out.w_single;
    for (std::size_t i = 0; i < n; ++i) best[i] = std::max(out.v[i], w);
    num::multiply_into(g, best, cont);
    const double w_next = v1 + beta * std::inner_product(f.begin(), f.end(), best.begin(), 0.0);

    double diff = std::abs(w_next - w);
    for (std::size_t i = 0; i < n; ++i) {
      const double v_next = v2 + grid[i] + beta * cont[i];
      diff = std::max(diff, std::abs(v_next - out.v[i]));
      out.v[i] = v_next;
    }
    out.w_single = w_next;
    out.iterations = it;
    out.residual = diff;
    out.residual_history.push_back(diff);
    if (diff < tol) return out;
  }
  fail(ErrorCode::MaxIterationsExceeded,
       "VFI stopped after " + std::to_string(max_iter) + " sweeps, residual " +
           std::to_string(out.residual));
}

/// Threshold bin iota (0-based, first index with V >= W) and the share omega of that bin that
/// goes to the single state.
struct Threshold {
  std::size_t iota = 0;
  double omega = 0.0;
};

inline Threshold dt_threshold(std::span<const double> v, double w_single) {
  const std::size_t n = v.size();
  if (n == 0) fail(ErrorCode::InvalidInput, "dt_threshold: empty value vector");
  for (std::size_t i = 1; i < n; ++i) {
    if (v[i] < v[i - 1] - 1e-9) {
      fail(ErrorCode::NonMonotoneValue, "married value decreases at index " + std::to_string(i));
    }
  }
  if (w_single > v[n - 1]) fail(ErrorCode::AllReject, "single value exceeds every married value");
  const auto it = std::find_if(v.begin(), v.end(), [&](double x) { return x >= w_single; });
  const auto iota = static_cast<std::size_t>(it - v.begin());
  if (iota == 0) return {0, 0.0};
  const double span = v[iota] - v[iota - 1];
  const double omega = span > 0.0 ? (w_single - v[iota - 1]) / span : 1.0;
  return {iota, std::clamp(omega, 0.0, 1.0)};
}

/// Column-stochastic (N+1)x(N+1) transition; states 0..N-1 are married bins, state N is single.
/// Column j carries the next-period law of a household currently in state j after the
/// marry/divorce decision, with bin iota split by omega.
inline num::DenseMatrix build_transition(const num::DenseMatrix& g, std::span<const double> f,
                                         Threshold thr) {
  const std::size_t n = g.rows();
  if (g.cols() != n || f.size() != n || thr.iota >= n) {
    fail(ErrorCode::InvalidInput, "build_transition: inconsistent dimensions or threshold");
  }
  num::DenseMatrix p(n + 1, n + 1);
  const std::size_t iota = thr.iota;
  const double omega = thr.omega;

  // Married columns: rows above the threshold are the transpose of G. Blocked for locality.
  constexpr std::size_t kBlock = 64;
  for (std::size_t jb = 0; jb < n; jb += kBlock) {
    const std::size_t je = std::min(n, jb + kBlock);
    for (std::size_t ib = iota + 1; ib < n; ib += kBlock) {
      const std::size_t ie = std::min(n, ib + kBlock);
      for (std::size_t j = jb; j < je; ++j) {
        const auto grow = g.row(j);
        for (std::size_t i = ib; i < ie; ++i) p(i, j) = grow[i];
      }
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    const auto grow = g.row(j);
    double below = 0.0;
    for (std::size_t k = 0; k < iota; ++k) below += grow[k];
    p(iota, j) = grow[iota] * (1.0 - omega);
    p(n, j) = below + grow[iota] * omega;
  }

  double below = 0.0;
  for (std::size_t k = 0; k < iota; ++k) below += f[k];
  for (std::size_t i = iota + 1; i < n; ++i) p(i, n) = f[i];
  p(iota, n) = f[iota] * (1.0 - omega);
  p(n, n) = below + f[iota] * omega;
  return p;
}

enum class StationaryMode { closed_form, iterate };

struct StationaryDist {
  std::vector<double> m;  // married mass per bin
  double s = 0.0;         // single mass
  std::size_t iterations = 0;
};

/// Stationary point of x = (1 - delta) P x + delta e_single, normalized to unit mass.
/// closed_form solves (I - (1 - delta) P) x = delta e_single densely (O(N^3));
/// iterate applies the affine map from x0 = e_single until the sup-norm change is below tol (O(N^2)
/// per sweep).
inline StationaryDist dt_stationary(const num::DenseMatrix& p, double delta, StationaryMode mode,
                                    double tol = 1e-12, std::size_t max_iter = 1000000) {
  const std::size_t dim = p.rows();
  if (p.cols() != dim || dim < 2) fail(ErrorCode::InvalidInput, "dt_stationary: P must be square");
  if (!(delta > 0.0 && delta < 1.0)) fail(ErrorCode::InvalidParameter, "delta must lie in (0,1)");

  std::vector<double> x(dim, 0.0);
  std::size_t iterations = 0;
  if (mode == StationaryMode::closed_form) {
    num::DenseMatrix a(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) {
      auto arow = a.row(i);
      const auto prow = p.row(i);
      for (std::size_t j = 0; j < dim; ++j) arow[j] = -(1.0 - delta) * prow[j];
      arow[i] += 1.0;
    }
    std::vector<double> rhs(dim, 0.0);
    rhs[dim - 1] = delta;
    x = num::dense_solve(std::move(a), rhs);
  } else {
    x[dim - 1] = 1.0;
    std::vector<double> next(dim);
    for (;;) {
      if (iterations == max_iter) {
        fail(ErrorCode::MaxIterationsExceeded,
             "stationary iteration stopped after " + std::to_string(max_iter) + " sweeps");
      }
      ++iterations;
      num::multiply_into(p, x, next);
      double diff = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        double v = (1.0 - delta) * next[i];
        if (i + 1 == dim) v += delta;
        diff = std::max(diff, std::abs(v - x[i]));
        x[i] = v;
      }
      if (diff < tol) break;
    }
  }
  const double total = std::accumulate(x.begin(), x.end(), 0.0);
  for (double& v : x) v /= total;
  StationaryDist out;
  out.s = x.back();
  x.pop_back();
  out.m = std::move(x);
  out.iterations = iterations;
  return out;
}

struct DtRates {
  double prob_marriage = 0.0;
  double prob_divorce = 0.0;
};

/// Per-period marriage probability of a single and divorce probability of a surviving couple.
inline DtRates dt_rates(const num::DenseMatrix& g, std::span<const double> f, Threshold thr,
                        std::span<const double> m, double s) {
  const std::size_t n = g.rows();
  if (f.size() != n || m.size() != n || thr.iota >= n) {
    fail(ErrorCode::InvalidInput, "dt_rates: inconsistent dimensions");
  }
  if (1.0 - s < 1e-12) fail(ErrorCode::DegenerateMass, "married mass is zero");
  DtRates r;
  for (std::size_t i = thr.iota + 1; i < n; ++i) r.prob_marriage += f[i];
  r.prob_marriage += (1.0 - thr.omega) * f[thr.iota];
  double divorce = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (m[j] == 0.0) continue;
    const auto grow = g.row(j);
    double below = thr.omega * grow[thr.iota];
    for (std::size_t k = 0; k < thr.iota; ++k) below += grow[k];
    divorce += m[j] * below;
  }
  r.prob_divorce = divorce / (1.0 - s);
  return r;
}

struct DtConfig {
  std::size_t n = 501;
  double tol = 1e-9;
  std::size_t max_iter = 100000;
  StationaryMode mode = StationaryMode::iterate;
};

struct DtSolution {
  Grid grid;
  std::vector<double> v;
  double w_single = 0.0;
  std::size_t iota = 0;
  double omega = 0.0;
  double b_threshold = 0.0;  // b_{iota-1} + omega db, the threshold implied by the bin split
  double s = 0.0;
  std::vector<double> m;
  double prob_marriage = 0.0;
  double prob_divorce = 0.0;
  std::size_t iterations = 0;
  std::size_t stationary_iterations = 0;
  std::size_t working_bytes = 0;  // dense G and P plus grid-sized vectors

  double married_share() const { return 1.0 - s; }
};

/// Full discrete-time equilibrium: Tauchen G, discretized F, VFI, threshold, P, stationary law.
inline DtSolution solve_dt(const ModelParams& params, const HouseholdValues& values,
                           const DtConfig& config = {}) {
  params.validate();
  const Demographics demo = params.demographics();
  DtSolution sol;
  sol.grid = dt_grid(params.singles, params.ar1, config.n);
  const num::DenseMatrix g = tauchen(params.ar1, sol.grid);
  const SinglesDiscretization fd = discretize_singles(params.singles, sol.grid);

  VfiResult vfi = solve_vfi(demo.beta, sol.grid, g, fd.probs, values.single, values.married,
                            config.tol, config.max_iter);
  const Threshold thr = dt_threshold(vfi.v, vfi.w_single);
  const num::DenseMatrix p = build_transition(g, fd.probs, thr);
  StationaryDist dist = dt_stationary(p, demo.delta, config.mode);
  const DtRates rates = dt_rates(g, fd.probs, thr, dist.m, dist.s);

  const std::size_t n = config.n;
  sol.working_bytes = g.bytes() + p.bytes() + (6 * n + 2) * sizeof(double);
  if (config.mode == StationaryMode::closed_form) sol.working_bytes += p.bytes();

  sol.v = std::move(vfi.v);
  sol.w_single = vfi.w_single;
  sol.iterations = vfi.iterations;
  sol.iota = thr.iota;
  sol.omega = thr.omega;
  sol.b_threshold =
      thr.iota == 0 ? sol.grid.front() : sol.grid[thr.iota - 1] + thr.omega * sol.grid.db;
  sol.s = dist.s;
  sol.m = std::move(dist.m);
  sol.stationary_iterations = dist.iterations;
  sol.prob_marriage = rates.prob_marriage;
  sol.prob_divorce = rates.prob_divorce;
  return sol;
}

}  // namespace gghact
