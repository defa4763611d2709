#include <cmath>

#include <gtest/gtest.h>

#include "gghact/experiments.hpp"

using namespace gghact;

TEST(Trend, BaseYearAndOneStep) {
  const TrendPath path;
  const Prices p0 = prices_at(path, 1950);
  EXPECT_DOUBLE_EQ(p0.w, 1.0);
  EXPECT_DOUBLE_EQ(p0.p, 9.959);
  const Prices p1 = prices_at(path, 1951);
  EXPECT_NEAR(p1.w, 1.022, 1e-15);
  EXPECT_NEAR(p1.p, 9.959 / 1.059, 1e-14);
}

TEST(Trend, MonotoneOverPath) {
  const TrendPath path;
  for (int y = 1950; y < 2020; ++y) {
    EXPECT_LT(prices_at(path, y).w, prices_at(path, y + 1).w);
    EXPECT_GT(prices_at(path, y).p, prices_at(path, y + 1).p);
  }
}

TEST(Trend, LinearFormAndDomain) {
  TrendPath path;
  path.form = TrendForm::linear;
  EXPECT_NEAR(prices_at(path, 1960).w, 1.22, 1e-14);
  EXPECT_NEAR(prices_at(path, 1960).p, 9.959 * (1 - 0.59), 1e-12);
  EXPECT_THROW(prices_at(path, 1940), Error);
  EXPECT_THROW(prices_at(path, 1970), Error);  // p turns negative
}

TEST(Path, ConstantPricesGiveIdenticalRows) {
  TrendPath path;
  path.dw = 0.0;
  path.dp = 0.0;
  path.last_year = 1953;
  SolverSettings settings;
  settings.dt.n = 101;
  settings.ct.n = 201;
  for (Method m : {Method::ct, Method::dt}) {
    const auto rows = simulate_path(ModelParams{}, path, m, settings);
    ASSERT_EQ(rows.size(), 4u);
    for (const auto& r : rows) {
      EXPECT_EQ(r.married_share, rows[0].married_share);
      EXPECT_EQ(r.prob_divorce, rows[0].prob_divorce);
      EXPECT_EQ(r.prob_marriage, rows[0].prob_marriage);
    }
  }
}

TEST(Path, ParallelMatchesSerial) {
  TrendPath path;
  path.last_year = 1957;
  SolverSettings settings;
  settings.ct.n = 301;
  const auto a = simulate_path(ModelParams{}, path, Method::ct, settings, false);
  const auto b = simulate_path(ModelParams{}, path, Method::ct, settings, true);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].year, b[i].year);
    EXPECT_EQ(a[i].married_share, b[i].married_share);
  }
}

TEST(Path, ErrorsCarryTheYear) {
  ModelParams params;
  params.prefs.cbar = 1.5;  // exceeds the 1950 single budget
  try {
    solve_year(params, TrendPath{}, 1950, Method::dt, SolverSettings{});
    FAIL() << "expected InfeasibleBudget";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InfeasibleBudget);
    EXPECT_NE(std::string(e.what()).find("1950"), std::string::npos);
  }
}

TEST(Calibration, LossDefinition) {
  Moments model = kDataTargets;
  EXPECT_EQ(moment_loss(model, kDataTargets, {1, 1, 1, 1, 1, 1}), 0.0);
  model[1] = 2 * kDataTargets[1];
  EXPECT_DOUBLE_EQ(moment_loss(model, kDataTargets, {1, 1, 1, 1, 1, 1}), 1.0);
  EXPECT_DOUBLE_EQ(moment_loss(model, kDataTargets, {1, 0, 1, 1, 1, 1}), 0.0);
}

TEST(Calibration, InfeasiblePointGetsPenalty) {
  const double loss = calibration_loss(ModelParams{}, {0.9, -0.5, 0.1}, TrendPath{}, CtConfig{},
                                       CalibrationSettings{});
  EXPECT_EQ(loss, kFailedEvaluationLoss);
}

TEST(Calibration, FromNaiveStartImprovesAndIsStable) {
  const ModelParams params;
  const OuProcess start = naive_ou(params);
  const auto res = calibrate_ou(params, start, TrendPath{}, CtConfig{});
  EXPECT_LE(res.loss, res.start_loss);
  ASSERT_FALSE(res.trace.empty());
  for (std::size_t i = 1; i < res.trace.size(); ++i) {
    EXPECT_LE(res.trace[i].loss, res.trace[i - 1].loss);
  }

  CalibrationSettings again;
  again.step = 0.02;
  const auto rerun = calibrate_ou(params, res.estimate, TrendPath{}, CtConfig{}, again);
  EXPECT_NEAR(rerun.estimate.mu_m, res.estimate.mu_m, 0.01 * std::abs(res.estimate.mu_m));
  EXPECT_NEAR(rerun.estimate.sigma_m2, res.estimate.sigma_m2, 0.01 * res.estimate.sigma_m2);
  EXPECT_NEAR(rerun.estimate.eta, res.estimate.eta, 0.01 * res.estimate.eta);
}

TEST(Bench, CellsSlopesAndMonotoneTime) {
  BenchSettings bench;
  bench.n_values = {100, 200, 400, 800};
  bench.repeats = 3;
  const auto res = run_benchmark(ModelParams{}, prices_at(TrendPath{}, 1950), bench, {});
  ASSERT_EQ(res.cells.size(), 8u);
  ASSERT_EQ(res.slopes.size(), 2u);
  EXPECT_FALSE(res.any_timeout());
  for (const auto& c : res.cells) {
    EXPECT_EQ(c.repeats, 3u);
    EXPECT_GT(c.median_time_s, 0.0);
    EXPECT_GT(c.peak_bytes, 0u);
  }
  for (std::size_t k = 5; k < 8; ++k) {
    EXPECT_GE(res.cells[k].median_time_s, res.cells[k - 1].median_time_s);  // dt cells
  }
  EXPECT_NEAR(res.slopes[1].memory_slope, 2.0, 0.2);
  EXPECT_NEAR(res.slopes[0].memory_slope, 1.0, 0.2);
}

TEST(Bench, SettingsValidated) {
  BenchSettings bench;
  bench.n_values = {100, 200, 400};
  EXPECT_THROW(run_benchmark(ModelParams{}, {}, bench, {}), Error);
  bench.n_values = {400, 200, 800, 1600};
  EXPECT_THROW(run_benchmark(ModelParams{}, {}, bench, {}), Error);
}
