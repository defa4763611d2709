#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gghact/error.hpp"
#include "gghact/match_process.hpp"
#include "gghact/numerics/tridiag.hpp"
#include "gghact/params.hpp"

namespace gghact {

struct CtConfig {
  std::size_t n = 501;
  double n_std = 5.0;          // grid half-width in stationary sd of the OU process
  double pseudo_step = 100.0;  // implicit pseudo-time step
  double tol = 1e-9;           // inner and outer tolerance
  std::size_t max_inner = 100000;
  std::size_t max_outer = 10000;
  double damping = 0.5;  // weight on the fresh W in the outer update
};

/// B = (1/step + rho) I - A with its factorization, built once per (params, grid).
struct ImplicitMatrix {
  num::TriDiag b_mat;
  num::TriDiagFactorization factorization;
  double pseudo_step;

  ImplicitMatrix(const num::TriDiag& a, double rho, double step)
      : b_mat(negate_shift(a, 1.0 / step + rho)), factorization(b_mat), pseudo_step(step) {}

  std::size_t bytes() const noexcept { return b_mat.bytes() + factorization.bytes(); }

 private:
  static num::TriDiag negate_shift(const num::TriDiag& a, double shift) {
    num::TriDiag b(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) b.diag[i] = shift - a.diag[i];
    for (std::size_t i = 0; i + 1 < a.size(); ++i) {
      b.lower[i] = -a.lower[i];
      b.upper[i] = -a.upper[i];
    }
    return b;
  }
};

/// Threshold read off an increasing unclamped value: V~_{iota-1} < W <= V~_iota, and
/// b* = b_{iota-1} + omega db.
struct CtThreshold {
  std::size_t iota = 1;
  double omega = 0.0;
  double b_star = 0.0;
  bool below_grid = false;  // every grid point accepts
  bool above_grid = false;  // no grid point accepts
};

inline CtThreshold locate_threshold(std::span<const double> v_unclamped, double w_single,
                                    const Grid& grid) {
  const std::size_t n = v_unclamped.size();
  for (std::size_t i = 1; i < n; ++i) {
    if (v_unclamped[i] < v_unclamped[i - 1] - 1e-9) {
      fail(ErrorCode::NonMonotoneUnclamped,
           "unclamped married value decreases at index " + std::to_string(i));
    }
  }
  CtThreshold t;
  if (v_unclamped[0] >= w_single) {
    t.iota = 1;
    t.omega = 0.0;
    t.below_grid = v_unclamped[0] > w_single;
  } else if (v_unclamped[n - 1] < w_single) {
    t.iota = n - 1;
    t.omega = 1.0;
    t.above_grid = true;
  } else {
    const auto it =
        std::find_if(v_unclamped.begin(), v_unclamped.end(), [&](double x) { return x >= w_single; });
    t.iota = static_cast<std::size_t>(it - v_unclamped.begin());
    const double lo = v_unclamped[t.iota - 1];
    const double hi = v_unclamped[t.iota];
    t.omega = std::clamp((w_single - lo) / (hi - lo), 0.0, 1.0);
  }
  t.b_star = grid[t.iota - 1] + t.omega * grid.db;
  return t;
}

struct HjbResult {
  std::vector<double> v;            // projected, V >= W
  std::vector<double> v_unclamped;  // last implicit solve before projection
  double w_single = 0.0;
  double b_star = 0.0;
  std::size_t iota = 0;
  double omega = 0.0;
  std::size_t inner_iterations = 0;  // total over all outer passes
  std::size_t outer_iterations = 0;
  std::size_t working_bytes = 0;
};

/// Nested HJB iteration with the divorce variational inequality V >= W.
///
/// Inner loop, W held fixed: V~ = B^{-1}(u_m + V/step), V = max(V~, W), until the sup-norm change
/// drops below tol. Outer loop: b* from the unclamped V~, then
///   W_new = (v1 + lambda int_{b*} V f) / (rho + lambda (1 - F(b*)))
/// with the integral linearly interpolated in the boundary cell and F analytic, and the damped
/// update W <- damping W_new + (1 - damping) W, until |W_new - W| < tol.
inline HjbResult solve_hjb(const Demographics& demo, const Grid& grid, const num::TriDiag& a,
                           std::span<const double> u_m, double v1, const SinglesDraw& draw,
                           const CtConfig& cfg) {
  const std::size_t n = grid.size();
  if (a.size() != n || u_m.size() != n) fail(ErrorCode::InvalidInput, "solve_hjb: size mismatch");
  if (!(demo.rho > 0.0)) fail(ErrorCode::InvalidParameter, "rho must be > 0");
  if (!(demo.lambda >= 0.0)) fail(ErrorCode::InvalidParameter, "lambda must be >= 0");
  if (!(cfg.pseudo_step > 0.0)) fail(ErrorCode::InvalidParameter, "pseudo_step must be > 0");
  if (!(cfg.damping > 0.0 && cfg.damping <= 1.0)) {
    fail(ErrorCode::InvalidParameter, "damping must lie in (0,1]");
  }

  const ImplicitMatrix implicit(a, demo.rho, cfg.pseudo_step);
  const double inv_step = 1.0 / cfg.pseudo_step;
  std::vector<double> dens(n);
  for (std::size_t i = 0; i < n; ++i) dens[i] = draw.pdf(grid[i]);

  HjbResult out;
  out.v.resize(n);
  out.v_unclamped.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.v[i] = u_m[i] / demo.rho;
  double w = v1 / demo.rho;
  std::vector<double>& vt = out.v_unclamped;

  CtThreshold thr;
  for (std::size_t outer = 1;; ++outer) {
    if (outer > cfg.max_outer) {
      fail(ErrorCode::MaxIterationsExceeded,
           "outer W loop did not converge in " + std::to_string(cfg.max_outer) + " passes");
    }
    out.outer_iterations = outer;
    for (std::size_t inner = 1;; ++inner) {
      if (inner > cfg.max_inner) {
        fail(ErrorCode::MaxIterationsExceeded,
             "inner HJB loop did not converge in " + std::to_string(cfg.max_inner) + " sweeps");
      }
      ++out.inner_iterations;
      for (std::size_t i = 0; i < n; ++i) vt[i] = u_m[i] + inv_step * out.v[i];
      implicit.factorization.solve_in_place(vt);
      double diff = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double projected = std::max(vt[i], w);
        diff = std::max(diff, std::abs(projected - out.v[i]));
        out.v[i] = projected;
      }
      if (diff < cfg.tol) break;
    }

    thr = locate_threshold(vt, w, grid);
    double integral = (1.0 - thr.omega) * out.v[thr.iota - 1] * dens[thr.iota - 1];
    for (std::size_t k = thr.iota; k < n; ++k) integral += out.v[k] * dens[k];
    integral *= grid.db;
    const double accept = 1.0 - draw.cdf(thr.b_star);
    const double w_new = (v1 + demo.lambda * integral) / (demo.rho + demo.lambda * accept);
    if (std::abs(w_new - w) < cfg.tol) break;
    w = cfg.damping * w_new + (1.0 - cfg.damping) * w;
  }

  if (thr.below_grid) fail(ErrorCode::AllAccept, "threshold b* lies below the grid");
  if (thr.above_grid) fail(ErrorCode::AllReject, "threshold b* lies above the grid");
  out.w_single = w;
  out.b_star = thr.b_star;
  out.iota = thr.iota;
  out.omega = thr.omega;
  out.working_bytes = a.bytes() + implicit.bytes() + 5 * n * sizeof(double);
  return out;
}

struct KfeResult {
  std::vector<double> m;  // married density on the full grid, zero below the continuation region
  double s = 0.0;         // interpolated single mass
  double s_lo = 0.0;      // boundary at b_{iota-1}
  double s_hi = 0.0;      // boundary at b_iota
  double boundary_density = 0.0;  // interpolated married density at the absorbing cell
  std::size_t working_bytes = 0;
};

/// Stationary KFE with the population constraint, solved twice with the absorbing boundary on the
/// clean grid points b_{iota-1} and b_iota and interpolated by omega.
///
/// For boundary index j: T_j = A_j' - nu I on {b_j..b_{n-1}}, z_j = T_j^{-1} f_j (one tridiagonal
/// solve), s_j = 1 / (1 - lambda db sum z_j) and the married density is -lambda s_j z_j.
inline KfeResult solve_kfe(const num::TriDiag& a, const Grid& grid, const SinglesDraw& draw,
                           double nu, double lambda, std::size_t iota, double omega) {
  const std::size_t n = grid.size();
  if (a.size() != n) fail(ErrorCode::InvalidInput, "solve_kfe: generator/grid size mismatch");
  if (iota < 1 || iota >= n) fail(ErrorCode::InvalidInput, "solve_kfe: threshold index out of range");
  if (!(nu > 0.0)) fail(ErrorCode::InvalidParameter, "nu must be > 0");

  KfeResult out;
  out.m.assign(n, 0.0);
  const double weights[2] = {1.0 - omega, omega};
  double s_parts[2] = {0.0, 0.0};
  for (int side = 0; side < 2; ++side) {
    const std::size_t first = iota - 1 + static_cast<std::size_t>(side);
    num::TriDiag t = a.trailing(first).transposed();
    for (double& d : t.diag) d -= nu;
    std::vector<double> z(n - first);
    for (std::size_t i = first; i < n; ++i) z[i - first] = draw.pdf(grid[i]);
    const num::TriDiagFactorization fact(t);
    fact.solve_in_place(z);
    double zsum = 0.0;
    for (double v : z) zsum += v;
    const double s = 1.0 / (1.0 - lambda * grid.db * zsum);
    s_parts[side] = s;
    for (std::size_t i = first; i < n; ++i) out.m[i] -= weights[side] * lambda * s * z[i - first];
    out.boundary_density -= weights[side] * lambda * s * z[0];
    out.working_bytes = std::max(out.working_bytes, t.bytes() + fact.bytes() + z.capacity() * sizeof(double));
  }
  out.working_bytes += n * sizeof(double);
  out.s_lo = s_parts[0];
  out.s_hi = s_parts[1];
  out.s = weights[0] * s_parts[0] + weights[1] * s_parts[1];
  for (std::size_t i = 0; i < n; ++i) {
    if (out.m[i] < -1e-8) {
      fail(ErrorCode::NegativeDensity, "married density negative at index " + std::to_string(i));
    }
  }
  return out;
}

struct CtRates {
  double hazard_marriage = 0.0;
  double hazard_divorce = 0.0;
  double prob_marriage = 0.0;  // 1 - exp(-hazard dt)
  double prob_divorce = 0.0;
};

/// Marriage hazard lambda (1 - F(b*)); divorce hazard from stationary mass balance
/// lambda s (1 - F(b*)) = (hazard_divorce + nu)(1 - s), floored at zero.
inline CtRates ct_rates(const SinglesDraw& draw, double lambda, double nu, double b_star, double s,
                        double dt = 1.0) {
  if (1.0 - s < 1e-12) fail(ErrorCode::DegenerateMass, "married mass is zero");
  CtRates r;
  const double accept = 1.0 - draw.cdf(b_star);
  r.hazard_marriage = lambda * accept;
  r.hazard_divorce = std::max(0.0, (lambda * s * accept - nu * (1.0 - s)) / (1.0 - s));
  r.prob_marriage = 1.0 - std::exp(-r.hazard_marriage * dt);
  r.prob_divorce = 1.0 - std::exp(-r.hazard_divorce * dt);
  return r;
}

struct CtSolution {
  Grid grid;
  std::vector<double> v;
  std::vector<double> v_unclamped;
  double w_single = 0.0;
  double b_star = 0.0;
  std::size_t iota = 0;
  double omega = 0.0;
  double s = 0.0;
  double s_lo = 0.0;
  double s_hi = 0.0;
  std::vector<double> m;
  double hazard_marriage = 0.0;
  double hazard_divorce = 0.0;
  double prob_marriage = 0.0;
  double prob_divorce = 0.0;
  double flux_hazard_divorce = 0.0;  // eta sigma_m2 m_boundary / db / (1 - s), cross-check only
  double upper_tail_mass = 0.0;      // singles draw mass above the grid
  bool tail_warning = false;
  std::size_t inner_iterations = 0;
  std::size_t outer_iterations = 0;
  std::size_t working_bytes = 0;

  double married_share() const { return 1.0 - s; }
};

inline Grid ct_grid(const OuProcess& ou, const CtConfig& cfg) {
  return build_grid(ou.mu_m, ou.sd(), cfg.n_std, cfg.n);
}

inline CtSolution solve_ct(const ModelParams& params, const HouseholdValues& values,
                           const CtConfig& cfg = {}) {
  params.validate();
  const Demographics demo = params.demographics();
  CtSolution sol;
  sol.grid = ct_grid(params.ou, cfg);
  const std::size_t n = sol.grid.size();
  const num::TriDiag a = ou_generator(params.ou, sol.grid);
  std::vector<double> u_m(n);
  for (std::size_t i = 0; i < n; ++i) u_m[i] = values.married + sol.grid[i];

  HjbResult hjb = solve_hjb(demo, sol.grid, a, u_m, values.single, params.singles, cfg);
  KfeResult kfe = solve_kfe(a, sol.grid, params.singles, demo.nu, demo.lambda, hjb.iota, hjb.omega);
  const CtRates rates = ct_rates(params.singles, demo.lambda, demo.nu, hjb.b_star, kfe.s, demo.dt);

  sol.v = std::move(hjb.v);
  sol.v_unclamped = std::move(hjb.v_unclamped);
  sol.w_single = hjb.w_single;
  sol.b_star = hjb.b_star;
  sol.iota = hjb.iota;
  sol.omega = hjb.omega;
  sol.inner_iterations = hjb.inner_iterations;
  sol.outer_iterations = hjb.outer_iterations;
  sol.s = kfe.s;
  sol.s_lo = kfe.s_lo;
  sol.s_hi = kfe.s_hi;
  sol.m = std::move(kfe.m);
  sol.hazard_marriage = rates.hazard_marriage;
  sol.hazard_divorce = rates.hazard_divorce;
  sol.prob_marriage = rates.prob_marriage;
  sol.prob_divorce = rates.prob_divorce;
  sol.flux_hazard_divorce = params.ou.eta * params.ou.sigma_m2 * kfe.boundary_density /
                            sol.grid.db / (1.0 - kfe.s);
  sol.upper_tail_mass = 1.0 - params.singles.cdf(sol.grid.back());
  sol.tail_warning = sol.upper_tail_mass > kTailMassLimit;
  sol.working_bytes = hjb.working_bytes + kfe.working_bytes + n * sizeof(double);
  return sol;
}

}  // namespace gghact
