#pragma once

#include <cstdio>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "gghact/experiments.hpp"
#include "gghact/io/config.hpp"
#include "gghact/io/csv.hpp"
#include "gghact/io/svg.hpp"

namespace gghact::cli {

struct CommandOptions {
  bool timing = false;  // fill solve_ms; off by default so repeated runs are byte-identical
};

inline std::filesystem::path prepare_output(const io::RunConfig& cfg) {
  const std::filesystem::path dir(cfg.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::InvalidInput, "cannot create output directory " + cfg.output_dir);
  return dir;
}

inline void write_provenance(const io::RunConfig& cfg, const std::filesystem::path& dir,
                             const std::string& command) {
  std::string text = "command = " + command + "\n";
  for (const auto& line : cfg.provenance) text += line + "\n";
  io::write_file((dir / "provenance.txt").string(), text);
}

inline const char* method_color(Method m) { return m == Method::ct ? "#d62728" : "#1f77b4"; }

inline std::string method_label(Method m) {
  return m == Method::ct ? "continuous time" : "discrete time";
}

/// Solves one year and writes solve_<year>_<method>.csv.
inline EquilibriumRow cmd_solve(const io::RunConfig& cfg, int year, Method method,
                                const CommandOptions& opt, std::ostream& out) {
  const auto dir = prepare_output(cfg);
  const EquilibriumRow row = solve_year(cfg.params, cfg.trend, year, method, cfg.solver_settings());
  const std::string name = "solve_" + std::to_string(year) + "_" + std::string(to_string(method));
  io::write_file((dir / (name + ".csv")).string(),
                 io::equilibrium_csv("equilibrium", {row}, opt.timing));
  write_provenance(cfg, dir, "solve --year " + std::to_string(year) + " --method " +
                                 std::string(to_string(method)));

  char buf[512];
  std::snprintf(buf, sizeof buf,
                "%d %s (N=%zu)\n  married share   %.4f\n  prob. divorce   %.4f\n"
                "  prob. marriage  %.4f\n  utility gap     %.6f\n",
                year, method_label(method).c_str(), row.n_grid, row.married_share,
                row.prob_divorce, row.prob_marriage, row.utility_gap);
  out << buf;
  if (row.b_star) {
    std::snprintf(buf, sizeof buf, "  b*              %.6f\n", *row.b_star);
    out << buf;
  }
  if (opt.timing) {
    std::snprintf(buf, sizeof buf, "  solve time      %.1f ms\n", row.solve_ms);
    out << buf;
  }
  out << "wrote " << (dir / (name + ".csv")).string() << "\n";
  return row;
}

inline io::Series year_series(const std::vector<EquilibriumRow>& rows, Method m,
                              double EquilibriumRow::*field) {
  io::Series s;
  s.name = method_label(m);
  s.color = method_color(m);
  s.dashed = m == Method::dt;
  for (const auto& r : rows) {
    if (r.method != m) continue;
    s.xs.push_back(r.year);
    s.ys.push_back(r.*field);
  }
  return s;
}

/// Steady-state sequence over the trend path; writes path.csv and two charts.
inline std::vector<EquilibriumRow> cmd_path(const io::RunConfig& cfg,
                                            const std::vector<Method>& methods,
                                            const CommandOptions& opt, std::ostream& out) {
  const auto dir = prepare_output(cfg);
  std::vector<EquilibriumRow> rows;
  for (Method m : methods) {
    auto part = simulate_path(cfg.params, cfg.trend, m, cfg.solver_settings());
    rows.insert(rows.end(), part.begin(), part.end());
  }
  io::write_file((dir / "path.csv").string(), io::equilibrium_csv("path", rows, opt.timing));

  auto panel = [&](const std::string& title, const std::string& y_label,
                   double EquilibriumRow::*field) {
    io::Panel p{title, "year", y_label, {}, false};
    for (Method m : methods) p.series.push_back(year_series(rows, m, field));
    return p;
  };
  io::write_file((dir / "path_share_gap.svg").string(),
                 io::render_svg({panel("Married share", "fraction married",
                                       &EquilibriumRow::married_share),
                                 panel("Utility gap v(2) - v(1)", "utility",
                                       &EquilibriumRow::utility_gap)}));
  io::write_file((dir / "path_rates.svg").string(),
                 io::render_svg({panel("Marriage probability", "annual probability",
                                       &EquilibriumRow::prob_marriage),
                                 panel("Divorce probability", "annual probability",
                                       &EquilibriumRow::prob_divorce)}));

  std::string cmd = "path --method ";
  cmd += methods.size() == 2 ? "both" : std::string(to_string(methods.front()));
  write_provenance(cfg, dir, cmd);

  char buf[256];
  for (Method m : methods) {
    const EquilibriumRow* first = nullptr;
    const EquilibriumRow* last = nullptr;
    for (const auto& r : rows) {
      if (r.method != m) continue;
      if (!first) first = &r;
      last = &r;
    }
    std::snprintf(buf, sizeof buf, "%s: married share %.4f (%d) -> %.4f (%d)\n",
                  method_label(m).c_str(), first->married_share, first->year,
                  last->married_share, last->year);
    out << buf;
  }
  out << "wrote " << rows.size() << " rows to " << (dir / "path.csv").string() << "\n";
  return rows;
}

/// Re-estimates the OU process; writes calibration_trace.csv and calibrated_ou.json.
inline CalibrationResult cmd_calibrate(const io::RunConfig& cfg, std::ostream& out) {
  const auto dir = prepare_output(cfg);
  const CalibrationResult res = calibrate_ou(cfg.params, cfg.calibration_start, cfg.trend,
                                             cfg.solver_settings().ct, cfg.calibration);
  io::write_file((dir / "calibration_trace.csv").string(), io::calibration_csv(res));
  io::write_file((dir / "calibrated_ou.json").string(), io::ou_overrides_json(res.estimate));
  write_provenance(cfg, dir, "calibrate");

  char buf[512];
  std::snprintf(buf, sizeof buf,
                "start  mu_m=%.4f sigma_m2=%.4f eta=%.4f  loss=%.6g\n"
                "final  mu_m=%.4f sigma_m2=%.4f eta=%.4f  loss=%.6g\n"
                "%s after %zu evaluations (%zu failed)\n",
                cfg.calibration_start.mu_m, cfg.calibration_start.sigma_m2,
                cfg.calibration_start.eta, res.start_loss, res.estimate.mu_m,
                res.estimate.sigma_m2, res.estimate.eta, res.loss,
                res.converged ? "converged" : "stopped at iteration limit", res.evaluations,
                res.failed_evaluations);
  out << buf;
  static const char* names[] = {"married 1950", "divorce 1950", "marriage 1950",
                                "married 2000", "divorce 2000", "marriage 2000"};
  for (std::size_t i = 0; i < res.fitted.size(); ++i) {
    std::snprintf(buf, sizeof buf, "  %-14s model %.4f  target %.4f\n", names[i], res.fitted[i],
                  cfg.calibration.targets[i]);
    out << buf;
  }
  return res;
}

/// Scaling benchmark at 1950 prices; writes bench.csv and a log-log chart.
inline BenchResult cmd_bench(const io::RunConfig& cfg, std::ostream& out) {
  const auto dir = prepare_output(cfg);
  char buf[256];
  auto report = [&](const BenchCell& c) {
    std::snprintf(buf, sizeof buf, "%s N=%-5zu median %.4g s  %zu bytes%s\n",
                  std::string(to_string(c.method)).c_str(), c.n, c.median_time_s, c.peak_bytes,
                  c.timed_out ? "  (timed out)" : "");
    out << buf << std::flush;
  };
  const BenchResult res = run_benchmark(cfg.params, prices_at(cfg.trend, cfg.trend.base_year()),
                                        cfg.bench, cfg.solver_settings(), report);
  io::write_file((dir / "bench.csv").string(), io::bench_csv(res));

  io::Panel time_panel{"Wall time", "grid size N", "median seconds", {}, true};
  io::Panel mem_panel{"Working memory", "grid size N", "bytes", {}, true};
  for (const auto& sl : res.slopes) {
    io::Series t, m;
    std::snprintf(buf, sizeof buf, "%s (slope %.2f)", std::string(to_string(sl.method)).c_str(),
                  sl.time_slope);
    t.name = buf;
    std::snprintf(buf, sizeof buf, "%s (slope %.2f)", std::string(to_string(sl.method)).c_str(),
                  sl.memory_slope);
    m.name = buf;
    t.color = m.color = method_color(sl.method);
    for (const auto& c : res.cells) {
      if (c.method != sl.method || c.timed_out) continue;
      t.xs.push_back(static_cast<double>(c.n));
      t.ys.push_back(c.median_time_s);
      m.xs.push_back(static_cast<double>(c.n));
      m.ys.push_back(static_cast<double>(c.peak_bytes));
    }
    time_panel.series.push_back(t);
    mem_panel.series.push_back(m);
  }
  io::write_file((dir / "bench.svg").string(), io::render_svg({time_panel, mem_panel}));
  write_provenance(cfg, dir, "bench");

  for (const auto& sl : res.slopes) {
    std::snprintf(buf, sizeof buf, "%s slopes: time %.3f, memory %.3f\n",
                  std::string(to_string(sl.method)).c_str(), sl.time_slope, sl.memory_slope);
    out << buf;
  }
  return res;
}

}  // namespace gghact::cli
