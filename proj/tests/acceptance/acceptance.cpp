// Acceptance suite: one [PASS]/[FAIL] line per criterion, detail lines indented below it.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "gghact/experiments.hpp"
#include "oracles/agent_sim.hpp"
#include "oracles/dense_gauss.hpp"
#include "oracles/ou_birth_death.hpp"

using namespace gghact;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Criterion {
  std::vector<std::string> details;
  bool ok = true;

  void check(bool cond, const char* fmt, auto... args) {
    char buf[512];
    if constexpr (sizeof...(args) == 0) {
      std::snprintf(buf, sizeof buf, "%s", fmt);
    } else {
      std::snprintf(buf, sizeof buf, fmt, args...);
    }
    details.push_back(std::string(cond ? "  ok    " : "  MISS  ") + buf);
    ok = ok && cond;
  }
};

struct Target {
  int year;
  double share, divorce, marriage;
};

void check_rows(Criterion& c, Method method, const std::vector<Target>& targets, double max_s) {
  const ModelParams params;
  const SolverSettings settings;
  for (const auto& t : targets) {
    const auto t0 = Clock::now();
    const EquilibriumRow row = solve_year(params, TrendPath{}, t.year, method, settings);
    const double secs = seconds_since(t0);
    c.check(std::abs(row.married_share - t.share) <= 0.02,
            "%d married share %.4f vs %.3f (+-0.02)", t.year, row.married_share, t.share);
    c.check(std::abs(row.prob_divorce - t.divorce) <= 0.005,
            "%d prob divorce %.4f vs %.3f (+-0.005)", t.year, row.prob_divorce, t.divorce);
    c.check(std::abs(row.prob_marriage - t.marriage) <= 0.005,
            "%d prob marriage %.4f vs %.3f (+-0.005)", t.year, row.prob_marriage, t.marriage);
    c.check(secs < max_s, "%d solve time %.3f s (< %.0f s)", t.year, secs, max_s);
  }
}

Criterion ac1() {
  Criterion c;
  check_rows(c, Method::dt, {{1950, 0.794, 0.011, 0.127}, {2000, 0.673, 0.025, 0.095}}, 30.0);
  return c;
}

Criterion ac2() {
  Criterion c;
  check_rows(c, Method::ct, {{1950, 0.807, 0.012, 0.131}, {2000, 0.677, 0.026, 0.096}}, 5.0);
  return c;
}

Criterion ac3() {
  Criterion c;
  const ModelParams params;
  const TrendPath path;
  std::vector<EquilibriumRow> rows[2];
  const Method methods[2] = {Method::ct, Method::dt};
  for (int k = 0; k < 2; ++k) {
    rows[k] = simulate_path(params, path, methods[k], SolverSettings{}, true);
    const auto& r = rows[k];
    const char* name = k == 0 ? "ct" : "dt";
    bool declining = true;
    bool divorce_up = true;
    bool marriage_down = true;
    for (std::size_t i = 1; i < r.size(); ++i) {
      declining = declining && r[i].married_share < r[i - 1].married_share;
      divorce_up = divorce_up && r[i].prob_divorce >= r[i - 1].prob_divorce;
      marriage_down = marriage_down && r[i].prob_marriage <= r[i - 1].prob_marriage;
    }
    c.check(declining, "%s married share strictly declining 1950-2020", name);
    c.check(std::abs(r.front().married_share - 0.80) <= 0.02, "%s 1950 share %.4f near 0.80",
            name, r.front().married_share);
    c.check(r.back().married_share < 0.72, "%s 2020 share %.4f < 0.72", name,
            r.back().married_share);
    c.check(divorce_up && r.back().prob_divorce > r.front().prob_divorce,
            "%s divorce probability rises %.4f -> %.4f", name, r.front().prob_divorce,
            r.back().prob_divorce);
    c.check(marriage_down && r.back().prob_marriage < r.front().prob_marriage,
            "%s marriage probability falls %.4f -> %.4f", name, r.front().prob_marriage,
            r.back().prob_marriage);
  }
  double gap = 0.0;
  int worst = 0;
  for (std::size_t i = 0; i < rows[0].size(); ++i) {
    const double d = std::abs(rows[0][i].married_share - rows[1][i].married_share);
    if (d > gap) gap = d, worst = rows[0][i].year;
  }
  c.check(gap <= 0.03, "max |ct - dt| married share %.4f (year %d) <= 0.03", gap, worst);
  return c;
}

Criterion ac4() {
  Criterion c;
  const auto t0 = Clock::now();
  BenchSettings bench;  // N = 400..6400, 5 repeats
  const auto res = run_benchmark(ModelParams{}, prices_at(TrendPath{}, 1950), bench, {},
                                 [](const BenchCell& cell) {
                                   std::printf("    bench %s N=%zu median %.4g s, %zu bytes\n",
                                               std::string(to_string(cell.method)).c_str(), cell.n,
                                               cell.median_time_s, cell.peak_bytes);
                                   std::fflush(stdout);
                                 });
  const double total = seconds_since(t0);
  c.check(!res.any_timeout(), "no cell timed out");
  for (const auto& s : res.slopes) {
    const bool ct = s.method == Method::ct;
    const double tlo = ct ? 0.7 : 1.6, thi = ct ? 1.3 : 2.4;
    const double mlo = ct ? 0.8 : 1.8, mhi = ct ? 1.2 : 2.2;
    c.check(s.time_slope >= tlo && s.time_slope <= thi, "%s time slope %.3f in [%.1f, %.1f]",
            ct ? "ct" : "dt", s.time_slope, tlo, thi);
    c.check(s.memory_slope >= mlo && s.memory_slope <= mhi, "%s memory slope %.3f in [%.1f, %.1f]",
            ct ? "ct" : "dt", s.memory_slope, mlo, mhi);
  }
  for (std::size_t i = 1; i < res.cells.size(); ++i) {
    const auto& a = res.cells[i - 1];
    const auto& b = res.cells[i];
    if (a.method != b.method) continue;
    c.check(b.median_time_s >= a.median_time_s, "%s median time N=%zu >= N=%zu",
            std::string(to_string(b.method)).c_str(), b.n, a.n);
  }
  c.check(total < 600.0, "total benchmark wall time %.1f s (< 600 s)", total);
  return c;
}

Criterion ac5() {
  Criterion c;
  ModelParams params;
  const auto hv = household_values(params, prices_at(TrendPath{}, 1950));
  const double estimated = solve_ct(params, hv).prob_divorce;
  params.ou = naive_ou(params);
  const double naive = solve_ct(params, hv).prob_divorce;
  c.check(naive > estimated, "1950 ct divorce probability naive %.4f > estimated %.4f", naive,
          estimated);
  return c;
}

Criterion ac6() {
  Criterion c;
  const auto t0 = Clock::now();
  const ModelParams params;
  const Demographics demo = params.demographics();

  // generator rows
  {
    const Grid g = ct_grid(params.ou, CtConfig{});
    const auto a = ou_generator(params.ou, g);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(a.row_sum(i)));
    c.check(worst <= 1e-12, "generator max |row sum| %.2e <= 1e-12", worst);
  }
  // OU stationary density
  {
    const Grid g = build_grid(params.ou.mu_m, params.ou.sd(), 6.0, 1001);
    const auto a = ou_generator(params.ou, g);
    const auto m = oracle::birth_death_density(a, g.db);
    const auto flow = num::multiply(a.transposed(), m);
    double sup = 0.0;
    double resid = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      sup = std::max(sup, std::abs(m[i] - num::normal_pdf(g[i], params.ou.mu_m, params.ou.sd())));
      resid = std::max(resid, std::abs(flow[i]));
    }
    c.check(sup <= 1e-3 && resid <= 1e-9,
            "OU stationary density sup error %.2e <= 1e-3 at N=1001 (A'm residual %.1e)", sup,
            resid);
  }
  // CT variational inequality, KFE mass, flux cross-check
  for (int year : {1950, 2000}) {
    const auto hv = household_values(params, prices_at(TrendPath{}, year));
    const CtConfig cfg;
    const auto sol = solve_ct(params, hv, cfg);
    const auto a = ou_generator(params.ou, sol.grid);
    const auto av = num::multiply(a, sol.v);
    double worst_free = 0.0;
    std::size_t worst_at = 0;
    double worst_clamped = 0.0;
    double min_gap = INFINITY;
    for (std::size_t i = 0; i < sol.v.size(); ++i) {
      min_gap = std::min(min_gap, sol.v[i] - sol.w_single);
      if (sol.v[i] > sol.w_single + 1e-9) {
        const double r = std::abs(demo.rho * sol.v[i] - (hv.married + sol.grid[i]) - av[i]);
        if (r > worst_free) worst_free = r, worst_at = i;
      } else {
        worst_clamped = std::max(worst_clamped, std::abs(sol.v[i] - sol.w_single));
      }
    }
    c.check(min_gap >= -1e-9, "%d min(V - W) = %.2e >= -1e-9", year, min_gap);
    c.check(worst_clamped == 0.0, "%d clamped points satisfy V = W exactly", year);
    c.check(worst_free <= 10 * cfg.tol,
            "%d HJB residual on V > W: max %.3e at index %zu (threshold index %zu) <= %.0e", year,
            worst_free, worst_at, sol.iota, 10 * cfg.tol);
    const double mass =
        sol.s + sol.grid.db * std::accumulate(sol.m.begin(), sol.m.end(), 0.0);
    c.check(std::abs(mass - 1.0) <= 1e-8, "%d KFE mass error %.2e <= 1e-8", year, mass - 1.0);
    const double rel = std::abs(sol.flux_hazard_divorce / sol.hazard_divorce - 1.0);
    c.check(rel <= 0.02, "%d flux vs balance divorce hazard %.5f vs %.5f (rel %.4f <= 0.02)", year,
            sol.flux_hazard_divorce, sol.hazard_divorce, rel);
    if (year == 1950) {
      const oracle::CtSimSetup setup{params.singles.mu_s, params.singles.sd(), params.ou.mu_m,
                                   params.ou.sigma_m2, params.ou.eta,      demo.lambda,
                                   demo.nu,             sol.b_star};
      const double s_mc = oracle::simulate_ct_singles(setup, 4000, 0.02, 20260101);
      c.check(std::abs(s_mc - sol.s) <= 0.01, "ct Monte-Carlo singles share %.4f vs %.4f (+-0.01)",
              s_mc, sol.s);
    }
  }
  // DT stationary law
  {
    const auto hv = household_values(params, prices_at(TrendPath{}, 1950));
    const auto sol = solve_dt(params, hv, DtConfig{});
    const Grid& g = sol.grid;
    const auto gm = tauchen(params.ar1, g);
    const auto f = discretize_singles(params.singles, g).probs;
    const auto p = build_transition(gm, f, {sol.iota, sol.omega});
    std::vector<double> x = sol.m;
    x.push_back(sol.s);
    const auto px = num::multiply(p, x);
    double resid = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double target = (1 - demo.delta) * px[i] + (i + 1 == x.size() ? demo.delta : 0.0);
      resid = std::max(resid, std::abs(target - x[i]));
    }
    c.check(resid <= 1e-10, "dt stationary fixed-point residual %.2e <= 1e-10", resid);
    const double s_mc = oracle::simulate_dt_singles(gm, f, sol.iota, sol.omega, demo.delta, 20000,
                                                    400, 600, 20260102);
    c.check(std::abs(s_mc - sol.s) <= 0.005, "dt Monte-Carlo singles share %.4f vs %.4f (+-0.005)",
            s_mc, sol.s);

    DtConfig small;
    small.n = 101;
    small.mode = StationaryMode::closed_form;
    const auto a = solve_dt(params, hv, small);
    small.mode = StationaryMode::iterate;
    const auto b = solve_dt(params, hv, small);
    double diff = std::abs(a.s - b.s);
    for (std::size_t i = 0; i < a.m.size(); ++i) diff = std::max(diff, std::abs(a.m[i] - b.m[i]));
    c.check(diff <= 1e-8, "dt closed-form vs iterate sup difference %.2e <= 1e-8 (N=101)", diff);
  }
  // tridiagonal vs dense
  {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::size_t n = 200;
    num::TriDiag m(n);
    std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) dense[i][i] = m.diag[i] = 3.0 + u(rng);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      dense[i + 1][i] = m.lower[i] = u(rng);
      dense[i][i + 1] = m.upper[i] = u(rng);
    }
    std::vector<double> rhs(n);
    for (double& v : rhs) v = u(rng);
    const auto x = num::tridiag_factor(m).solve(rhs);
    const auto y = oracle::gauss_solve(dense, rhs);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(x[i] - y[i]));
    c.check(err <= 1e-10, "tridiagonal vs dense max error %.2e <= 1e-10 (N=200)", err);
  }
  const double secs = seconds_since(t0);
  c.check(secs < 60.0, "property suite wall time %.1f s (< 60 s)", secs);
  return c;
}

Criterion ac7() {
  Criterion c;
  const ModelParams params;
  const OuProcess reference{0.951, 0.83, 0.113};
  const auto res = calibrate_ou(params, naive_ou(params), TrendPath{}, CtConfig{});
  const double ref = calibration_loss(params, reference, TrendPath{}, CtConfig{}, {});
  c.check(res.loss <= ref, "calibrated loss %.5f <= loss at reference point %.5f (start %.5f)",
          res.loss, ref, res.start_loss);
  const double est[3] = {res.estimate.mu_m, res.estimate.sigma_m2, res.estimate.eta};
  const double tgt[3] = {reference.mu_m, reference.sigma_m2, reference.eta};
  const char* names[3] = {"mu_m", "sigma_m2", "eta"};
  for (int k = 0; k < 3; ++k) {
    c.check(std::abs(est[k] / tgt[k] - 1.0) <= 0.15, "%s %.4f within 15%% of %.3f", names[k],
            est[k], tgt[k]);
  }
  return c;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Criterion()>> suite[] = {
      {"AC1 discrete-time 1950/2000 equilibrium rows", ac1},
      {"AC2 continuous-time 1950/2000 equilibrium rows", ac2},
      {"AC3 1950-2020 path shape and cross-method agreement", ac3},
      {"AC4 time and memory scaling slopes", ac4},
      {"AC5 naive OU parameters overstate divorce", ac5},
      {"AC6 property suite", ac6},
      {"AC7 OU re-estimation from the naive start", ac7},
  };
  int failures = 0;
  for (const auto& [name, run] : suite) {
    Criterion c;
    const auto t0 = Clock::now();
    try {
      c = run();
    } catch (const Error& e) {
      c.ok = false;
      c.details.push_back(std::string("  ERROR ") + e.what());
    }
    std::printf("[%s] %s (%.1f s)\n", c.ok ? "PASS" : "FAIL", name, seconds_since(t0));
    for (const auto& d : c.details) std::printf("%s\n", d.c_str());
    std::fflush(stdout);
    if (!c.ok) ++failures;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(suite)) - failures,
              std::size(suite));
  return failures == 0 ? 0 : 1;
}
