#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "gghact/ct_model.hpp"
#include "gghact/dt_model.hpp"
#include "gghact/error.hpp"
#include "gghact/numerics/minimize.hpp"
#include "gghact/numerics/regression.hpp"
#include "gghact/params.hpp"

namespace gghact {

enum class Method { ct, dt };

constexpr std::string_view to_string(Method m) { return m == Method::ct ? "ct" : "dt"; }

inline Method parse_method(std::string_view s) {
  if (s == "ct") return Method::ct;
  if (s == "dt") return Method::dt;
  fail(ErrorCode::InvalidInput, "unknown method '" + std::string(s) + "' (expected ct or dt)");
}

enum class TrendForm { geometric, linear };

/// Secular wage and home-goods price paths.
struct TrendPath {
  double w_1950 = 1.0;
  double dw = 0.022;
  double p_1950 = 9.959;
  double dp = 0.059;
  int first_year = 1950;
  int last_year = 2020;
  TrendForm form = TrendForm::geometric;

  int base_year() const { return 1950; }
  std::size_t n_years() const { return static_cast<std::size_t>(last_year - first_year + 1); }
};

/// Geometric: w = w_1950 (1+dw)^t, p = p_1950 (1+dp)^-t.  Linear: w = w_1950 (1 + dw t),
/// p = p_1950 (1 - dp t), with t = year - 1950.
inline Prices prices_at(const TrendPath& path, int year) {
  if (year < path.base_year()) fail(ErrorCode::InvalidInput, "year must be >= 1950");
  const double t = static_cast<double>(year - path.base_year());
  Prices pr;
  if (path.form == TrendForm::geometric) {
    pr.w = path.w_1950 * std::pow(1.0 + path.dw, t);
    pr.p = path.p_1950 * std::pow(1.0 + path.dp, -t);
  } else {
    pr.w = path.w_1950 * (1.0 + path.dw * t);
    pr.p = path.p_1950 * (1.0 - path.dp * t);
  }
  if (!(pr.w > 0.0) || !(pr.p > 0.0)) {
    fail(ErrorCode::DomainError, "trend produces non-positive prices in " + std::to_string(year));
  }
  return pr;
}

struct SolverSettings {
  DtConfig dt;
  CtConfig ct;
};

struct EquilibriumRow {
  int year = 0;
  Method method = Method::ct;
  double married_share = 0.0;
  double prob_marriage = 0.0;  // annual probability (CT hazards converted via 1 - e^-r)
  double prob_divorce = 0.0;
  double utility_gap = 0.0;  // v(p,w,2) - v(p,w,1)
  std::optional<double> b_star;  // CT only
  double solve_ms = 0.0;
  std::size_t n_grid = 0;
};

/// One stationary equilibrium at the given prices.
inline EquilibriumRow solve_equilibrium(const ModelParams& params, const Prices& prices,
                                        Method method, const SolverSettings& settings) {
  const HouseholdValues hv = household_values(params, prices);
  EquilibriumRow row;
  row.method = method;
  row.utility_gap = hv.gap();
  const auto t0 = std::chrono::steady_clock::now();
  if (method == Method::ct) {
    const CtSolution sol = solve_ct(params, hv, settings.ct);
    row.married_share = sol.married_share();
    row.prob_marriage = sol.prob_marriage;
    row.prob_divorce = sol.prob_divorce;
    row.b_star = sol.b_star;
    row.n_grid = sol.grid.size();
  } else {
    const DtSolution sol = solve_dt(params, hv, settings.dt);
    row.married_share = sol.married_share();
    row.prob_marriage = sol.prob_marriage;
    row.prob_divorce = sol.prob_divorce;
    row.n_grid = sol.grid.size();
  }
  row.solve_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

inline EquilibriumRow solve_year(const ModelParams& params, const TrendPath& path, int year,
                                 Method method, const SolverSettings& settings) {
  try {
    EquilibriumRow row = solve_equilibrium(params, prices_at(path, year), method, settings);
    row.year = year;
    return row;
  } catch (const Error& e) {
    throw Error(e.code(), "year " + std::to_string(year) + " (" + std::string(to_string(method)) +
                              "): " + e.detail());
  }
}

/// Sequence of steady states along the trend path, one independent equilibrium per year.
inline std::vector<EquilibriumRow> simulate_path(const ModelParams& params, const TrendPath& path,
                                                 Method method, const SolverSettings& settings,
                                                 bool parallel = false) {
  if (path.last_year < path.first_year) fail(ErrorCode::InvalidInput, "trend path has no years");
  std::vector<EquilibriumRow> rows;
  rows.reserve(path.n_years());
  if (!parallel) {
    for (int y = path.first_year; y <= path.last_year; ++y) {
      rows.push_back(solve_year(params, path, y, method, settings));
    }
    return rows;
  }
  std::vector<std::future<EquilibriumRow>> jobs;
  for (int y = path.first_year; y <= path.last_year; ++y) {
    jobs.push_back(std::async(std::launch::async, [&, y] {
      return solve_year(params, path, y, method, settings);
    }));
  }
  for (auto& j : jobs) rows.push_back(j.get());
  return rows;
}

// ---------------------------------------------------------------------------------------------
// OU re-estimation

/// Married share, divorce probability, marriage probability in 1950 then 2000.
using Moments = std::array<double, 6>;

inline constexpr Moments kDataTargets = {0.816, 0.011, 0.211, 0.625, 0.023, 0.082};
inline constexpr std::array<int, 2> kCalibrationYears = {1950, 2000};

struct CalibrationStep {
  std::size_t iteration = 0;
  double loss = 0.0;
  OuProcess ou;
};

struct CalibrationResult {
  OuProcess estimate;
  double loss = 0.0;
  double start_loss = 0.0;
  bool converged = false;
  std::size_t evaluations = 0;
  std::size_t failed_evaluations = 0;
  std::vector<CalibrationStep> trace;  // best point after each simplex iteration
  Moments fitted{};
};

struct CalibrationSettings {
  Moments targets = kDataTargets;
  Moments weights = {1, 1, 1, 1, 1, 1};
  double tol = 1e-6;
  std::size_t max_iter = 600;
  double step = 0.1;  // initial simplex edge as a fraction of each start coordinate
};

inline constexpr double kFailedEvaluationLoss = 1e6;

inline Moments ct_moments(ModelParams params, const OuProcess& ou, const TrendPath& path,
                          const CtConfig& cfg) {
  params.ou = ou;
  Moments out{};
  for (std::size_t k = 0; k < kCalibrationYears.size(); ++k) {
    const Prices pr = prices_at(path, kCalibrationYears[k]);
    const CtSolution sol = solve_ct(params, household_values(params, pr), cfg);
    out[3 * k] = sol.married_share();
    out[3 * k + 1] = sol.prob_divorce;
    out[3 * k + 2] = sol.prob_marriage;
  }
  return out;
}

/// Weighted sum of squared relative deviations.
inline double moment_loss(const Moments& model, const Moments& targets, const Moments& weights) {
  double loss = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const double dev = (model[i] - targets[i]) / targets[i];
    loss += weights[i] * dev * dev;
  }
  return loss;
}

/// Loss at an OU parameter point; evaluations that fail to solve or leave the parameter domain
/// return kFailedEvaluationLoss.
inline double calibration_loss(const ModelParams& params, const OuProcess& ou,
                               const TrendPath& path, const CtConfig& cfg,
                               const CalibrationSettings& cal) {
  if (!(ou.sigma_m2 > 0.0) || !(ou.eta > 0.0)) return kFailedEvaluationLoss;
  try {
    return moment_loss(ct_moments(params, ou, path, cfg), cal.targets, cal.weights);
  } catch (const Error&) {
    return kFailedEvaluationLoss;
  }
}

/// Minimum-distance estimate of (mu_m, sigma_m2, eta) by Nelder-Mead, all other parameters fixed.
inline CalibrationResult calibrate_ou(const ModelParams& params, const OuProcess& start,
                                      const TrendPath& path, const CtConfig& cfg,
                                      const CalibrationSettings& cal = {}) {
  start.validate();
  for (double t : cal.targets) {
    if (!(t > 0.0)) fail(ErrorCode::InvalidInput, "calibration targets must be positive");
  }
  CalibrationResult out;
  auto objective = [&](std::span<const double> x) {
    const double loss = calibration_loss(params, {x[0], x[1], x[2]}, path, cfg, cal);
    if (loss >= kFailedEvaluationLoss) ++out.failed_evaluations;
    return loss;
  };
  const std::array<double, 3> x0 = {start.mu_m, start.sigma_m2, start.eta};
  std::array<double, 3> scale{};
  for (std::size_t i = 0; i < 3; ++i) {
    scale[i] = cal.step * (x0[i] != 0.0 ? std::abs(x0[i]) : 1.0);
  }
  const num::SimplexResult res = num::minimize_simplex(objective, x0, scale, cal.tol, cal.max_iter);

  out.estimate = {res.x[0], res.x[1], res.x[2]};
  out.loss = res.value;
  out.start_loss = calibration_loss(params, start, path, cfg, cal);
  out.converged = res.converged;
  out.evaluations = res.evaluations;
  for (std::size_t i = 0; i < res.trace.size(); ++i) {
    const auto& p = res.trace_points[i];
    out.trace.push_back({i, res.trace[i], {p[0], p[1], p[2]}});
  }
  out.fitted = ct_moments(params, out.estimate, path, cfg);
  return out;
}

// ---------------------------------------------------------------------------------------------
// Scaling benchmark

struct BenchCell {
  Method method = Method::ct;
  std::size_t n = 0;
  double median_time_s = 0.0;
  std::size_t peak_bytes = 0;
  std::size_t repeats = 0;
  bool timed_out = false;
};

struct BenchSlopes {
  Method method = Method::ct;
  double time_slope = 0.0;
  double memory_slope = 0.0;
};

struct BenchResult {
  std::vector<BenchCell> cells;
  std::vector<BenchSlopes> slopes;
  bool any_timeout() const {
    return std::any_of(cells.begin(), cells.end(), [](const BenchCell& c) { return c.timed_out; });
  }
};

struct BenchSettings {
  std::vector<std::size_t> n_values = {400, 800, 1600, 3200, 6400};
  std::vector<Method> methods = {Method::ct, Method::dt};
  std::size_t repeats = 5;
  double timeout_s = 300.0;  // per run
};

/// Times the full solve (value functions and stationary distribution) at fixed prices.
/// Household utilities are computed once outside the timed region. One warm-up run per cell is
/// discarded; the cell reports the median of `repeats` runs and the solver's own buffer accounting.
inline BenchResult run_benchmark(const ModelParams& params, const Prices& prices,
                                 const BenchSettings& bench, SolverSettings settings,
                                 const std::function<void(const BenchCell&)>& on_cell = {}) {
  if (bench.n_values.size() < 4) fail(ErrorCode::InvalidInput, "benchmark needs >= 4 grid sizes");
  if (!std::is_sorted(bench.n_values.begin(), bench.n_values.end())) {
    fail(ErrorCode::InvalidInput, "benchmark grid sizes must be increasing");
  }
  if (bench.repeats < 3) fail(ErrorCode::InvalidInput, "benchmark needs >= 3 repeats");
  const HouseholdValues hv = household_values(params, prices);
  settings.dt.mode = StationaryMode::iterate;

  BenchResult out;
  for (Method method : bench.methods) {
    std::vector<double> ns;
    std::vector<double> times;
    std::vector<double> mems;
    for (std::size_t n : bench.n_values) {
      BenchCell cell;
      cell.method = method;
      cell.n = n;
      auto run_once = [&]() {
        const auto t0 = std::chrono::steady_clock::now();
        std::size_t bytes = 0;
        if (method == Method::ct) {
          CtConfig cfg = settings.ct;
          cfg.n = n;
          bytes = solve_ct(params, hv, cfg).working_bytes;
        } else {
          DtConfig cfg = settings.dt;
          cfg.n = n;
          bytes = solve_dt(params, hv, cfg).working_bytes;
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        cell.peak_bytes = std::max(cell.peak_bytes, bytes);
        return secs;
      };
      std::vector<double> samples;
      if (run_once() > bench.timeout_s) {
        cell.timed_out = true;
      } else {
        for (std::size_t r = 0; r < bench.repeats; ++r) {
          const double t = run_once();
          samples.push_back(t);
          if (t > bench.timeout_s) {
            cell.timed_out = true;
            break;
          }
        }
      }
      cell.repeats = samples.size();
      if (!samples.empty()) {
        std::sort(samples.begin(), samples.end());
        const std::size_t k = samples.size();
        cell.median_time_s =
            k % 2 == 1 ? samples[k / 2] : 0.5 * (samples[k / 2 - 1] + samples[k / 2]);
      }
      if (!cell.timed_out) {
        ns.push_back(static_cast<double>(n));
        times.push_back(cell.median_time_s);
        mems.push_back(static_cast<double>(cell.peak_bytes));
      }
      out.cells.push_back(cell);
      if (on_cell) on_cell(cell);
    }
    BenchSlopes sl;
    sl.method = method;
    if (ns.size() >= 2) {
      sl.time_slope = num::loglog_slope(ns, times);
      sl.memory_slope = num::loglog_slope(ns, mems);
    } else {
      sl.time_slope = sl.memory_slope = std::nan("");
    }
    out.slopes.push_back(sl);
  }
  return out;
}

}  // namespace gghact
