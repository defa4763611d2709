#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gghact/cli/commands.hpp"

namespace {

using gghact::Error;
using gghact::ErrorCode;

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitTimeout = 4;

bool is_config_error(ErrorCode c) {
  return c == ErrorCode::UnknownKey || c == ErrorCode::DomainError || c == ErrorCode::ParseError;
}

void override_field(gghact::io::RunConfig& cfg, const std::string& key, const std::string& value) {
  for (auto& line : cfg.provenance) {
    if (line.rfind(key + " = ", 0) == 0) line = key + " = " + value + "  [command line]";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Marriage and divorce search equilibrium solver (discrete and continuous time)"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> grid_n;
  std::optional<std::uint64_t> seed;
  bool timing = false;
  app.add_option("--config", config_path, "JSON config file (comments allowed)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--grid-n", grid_n, "grid size N")->check(CLI::Range(3ul, 1000000ul));
  app.add_option("--seed", seed, "seed recorded for Monte-Carlo checks");
  app.add_flag("--timing", timing, "fill the solve_ms column (makes output nondeterministic)");

  auto* solve = app.add_subcommand("solve", "solve one stationary equilibrium");
  int year = 1950;
  std::string method = "ct";
  solve->add_option("--year", year, "calendar year")->required();
  solve->add_option("--method", method, "ct or dt")->check(CLI::IsMember({"ct", "dt"}));

  auto* path = app.add_subcommand("path", "steady states for every year of the trend path");
  std::string path_method = "both";
  path->add_option("--method", path_method, "ct, dt or both")
      ->check(CLI::IsMember({"ct", "dt", "both"}));

  auto* calibrate = app.add_subcommand("calibrate", "re-estimate the OU match-quality process");
  auto* bench = app.add_subcommand("bench", "time and memory scaling in the grid size");

  CLI11_PARSE(app, argc, argv);

  gghact::io::RunConfig cfg;
  try {
    cfg = config_path.empty() ? gghact::io::parse_config("") : gghact::io::load_config(config_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (out_dir) {
    cfg.output_dir = *out_dir;
    override_field(cfg, "output_dir", *out_dir);
  }
  if (grid_n) {
    cfg.grid.n = *grid_n;
    override_field(cfg, "grid.n", std::to_string(*grid_n));
  }
  if (seed) {
    cfg.seed = *seed;
    override_field(cfg, "seed", std::to_string(*seed));
  }

  const gghact::cli::CommandOptions opt{timing};
  try {
    if (*solve) {
      gghact::cli::cmd_solve(cfg, year, gghact::parse_method(method), opt, std::cout);
    } else if (*path) {
      std::vector<gghact::Method> methods;
      if (path_method == "both") {
        methods = {gghact::Method::ct, gghact::Method::dt};
      } else {
        methods = {gghact::parse_method(path_method)};
      }
      gghact::cli::cmd_path(cfg, methods, opt, std::cout);
    } else if (*calibrate) {
      gghact::cli::cmd_calibrate(cfg, std::cout);
    } else if (*bench) {
      const auto res = gghact::cli::cmd_bench(cfg, std::cout);
      if (res.any_timeout()) {
        std::cerr << "error: " << gghact::to_string(ErrorCode::TimeoutExceeded)
                  << ": at least one benchmark cell exceeded " << cfg.bench.timeout_s << " s\n";
        return kExitTimeout;
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_config_error(e.code()) ? kExitConfig : kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  return EXIT_SUCCESS;
}
