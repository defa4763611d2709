#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "gghact/cli/commands.hpp"
#include "oracles/xml_check.hpp"

using namespace gghact;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("gghact_cli_test_" + name);
  fs::remove_all(dir);
  return dir;
}

io::RunConfig config_in(const fs::path& dir, std::string_view text = "") {
  io::RunConfig cfg = io::parse_config(text);
  cfg.output_dir = dir.string();
  return cfg;
}

std::string read(const fs::path& p) { return io::read_file(p.string()); }

void expect_table(const fs::path& file, const std::string& schema,
                  const std::vector<std::string>& columns) {
  const auto t = io::parse_csv(read(file));
  EXPECT_EQ(t.schema, schema + "/v1") << file;
  EXPECT_EQ(t.header, columns) << file;
  for (const auto& row : t.rows) EXPECT_EQ(row.size(), columns.size()) << file;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(GGHACT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(CliSolve, DefaultRowsAndDeterminism) {
  const auto dir = scratch_dir("solve");
  std::ostringstream out;
  const auto cfg = config_in(dir);
  const auto ct = cli::cmd_solve(cfg, 1950, Method::ct, {}, out);
  EXPECT_NEAR(ct.married_share, 0.807, 0.02);
  ASSERT_TRUE(ct.b_star.has_value());
  const auto dt = cli::cmd_solve(cfg, 2000, Method::dt, {}, out);
  EXPECT_NEAR(dt.married_share, 0.673, 0.02);

  cli::cmd_solve(cfg, 1950, Method::dt, {}, out);
  const std::string first = read(dir / "solve_1950_dt.csv");
  cli::cmd_solve(cfg, 1950, Method::dt, {}, out);
  EXPECT_EQ(read(dir / "solve_1950_dt.csv"), first);

  for (const char* f : {"solve_1950_ct.csv", "solve_2000_dt.csv", "solve_1950_dt.csv"}) {
    expect_table(dir / f, "equilibrium", io::kEquilibriumColumns);
  }
  const auto t = io::parse_csv(read(dir / "solve_1950_dt.csv"));
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0][6], "");  // b_star empty for dt
  EXPECT_EQ(t.rows[0][8], "");  // solve_ms empty without --timing
  EXPECT_TRUE(fs::exists(dir / "provenance.txt"));
}

TEST(CliPath, RowCountChartsAndAnnualizationNote) {
  const auto dir = scratch_dir("path");
  std::ostringstream out;
  const auto rows = cli::cmd_path(config_in(dir), {Method::ct, Method::dt}, {}, out);
  EXPECT_EQ(rows.size(), 142u);
  const std::string csv = read(dir / "path.csv");
  EXPECT_NE(csv.find("1 - exp(-hazard*dt)"), std::string::npos);
  expect_table(dir / "path.csv", "path", io::kEquilibriumColumns);
  EXPECT_EQ(io::parse_csv(csv).rows.size(), 142u);

  for (const char* f : {"path_share_gap.svg", "path_rates.svg"}) {
    const auto r = oracle::check_xml(read(dir / f));
    EXPECT_TRUE(r.well_formed) << f << ": " << r.error;
    EXPECT_EQ(r.root, "svg");
    EXPECT_EQ(r.element_counts.at("polyline"), 4) << f;  // 2 panels x 2 methods
  }
}

TEST(CliCalibrate, TraceAndRoundTrip) {
  const auto dir = scratch_dir("calibrate");
  std::ostringstream out;
  auto cfg = config_in(dir, R"({"calibrate": {"max_iter": 25}})");
  const auto res = cli::cmd_calibrate(cfg, out);
  expect_table(dir / "calibration_trace.csv", "calibration_trace", io::kCalibrationColumns);
  const auto trace = io::parse_csv(read(dir / "calibration_trace.csv"));
  ASSERT_EQ(trace.rows.size(), res.trace.size());
  for (std::size_t i = 1; i < trace.rows.size(); ++i) {
    EXPECT_LE(std::stod(trace.rows[i][1]), std::stod(trace.rows[i - 1][1]));
  }

  const auto reread = io::load_config((dir / "calibrated_ou.json").string());
  EXPECT_DOUBLE_EQ(reread.params.ou.mu_m, res.estimate.mu_m);
  EXPECT_DOUBLE_EQ(reread.params.ou.sigma_m2, res.estimate.sigma_m2);
  EXPECT_DOUBLE_EQ(reread.params.ou.eta, res.estimate.eta);
  const auto m = ct_moments(reread.params, reread.params.ou, reread.trend, CtConfig{});
  for (std::size_t i = 0; i < m.size(); ++i) EXPECT_EQ(m[i], res.fitted[i]);
}

TEST(CliBench, SchemaSlopeRowsAndChart) {
  const auto dir = scratch_dir("bench");
  std::ostringstream out;
  const auto cfg = config_in(dir, R"({"bench": {"n_values": [100, 200, 400, 800], "repeats": 3}})");
  const auto res = cli::cmd_bench(cfg, out);
  const auto t = io::parse_csv(read(dir / "bench.csv"));
  EXPECT_EQ(t.schema, "bench/v1");
  EXPECT_EQ(t.header, io::kBenchColumns);
  ASSERT_EQ(t.rows.size(), res.cells.size() + 2);
  EXPECT_EQ(t.rows[res.cells.size()][0], "ct");
  EXPECT_EQ(t.rows[res.cells.size()][1], "slope");
  EXPECT_EQ(t.rows[res.cells.size() + 1][0], "dt");
  const std::string svg = read(dir / "bench.svg");
  const auto r = oracle::check_xml(svg);
  EXPECT_TRUE(r.well_formed) << r.error;
  EXPECT_EQ(r.element_counts.at("polyline"), 4);
  EXPECT_NE(svg.find("slope"), std::string::npos);
}

TEST(CliBinary, ExitCodes) {
  const auto dir = scratch_dir("binary");
  fs::create_directories(dir);
  const auto bad = dir / "bad.json";
  io::write_file(bad.string(), R"({"grid": {"m": 3}})");
  EXPECT_EQ(run_cli("--config " + bad.string() + " solve --year 1950"), 2);
  const auto broken = dir / "broken.json";
  io::write_file(broken.string(), "{ \"grid\": ");
  EXPECT_EQ(run_cli("--config " + broken.string() + " solve --year 1950"), 2);
  EXPECT_EQ(run_cli("--out " + dir.string() + " solve --year 1940 --method dt"), 3);
  const auto slow = dir / "slow.json";
  io::write_file(slow.string(),
                 R"({"bench": {"n_values": [100, 200, 400, 800], "repeats": 3, "timeout_s": 1e-9}})");
  EXPECT_EQ(run_cli("--config " + slow.string() + " --out " + dir.string() + " bench"), 4);
  EXPECT_EQ(run_cli("--out " + dir.string() + " --grid-n 101 solve --year 1950 --method dt"), 0);
  EXPECT_NE(read(dir / "provenance.txt").find("grid.n = 101  [command line]"), std::string::npos);
}
