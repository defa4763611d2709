#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gghact/error.hpp"
#include "gghact/experiments.hpp"

namespace gghact::io {

/// Fixed-format number used in every emitted table so outputs are reproducible byte for byte.
inline std::string num(double v, int digits = 10) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

inline const std::vector<std::string> kEquilibriumColumns = {
    "year", "method", "married_share", "prob_marriage", "prob_divorce",
    "utility_gap", "b_star", "n_grid", "solve_ms"};

inline const std::vector<std::string> kBenchColumns = {"method", "n", "median_time_s",
                                                       "peak_bytes", "repeats"};

inline const std::vector<std::string> kCalibrationColumns = {"iteration", "loss", "mu_m",
                                                             "sigma_m2", "eta"};

inline std::string join(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  return out;
}

/// Every table starts with one "# schema: <name>/v1" comment line, optional further comment
/// lines, then the header row.
inline std::string table_preamble(const std::string& schema,
                                  const std::vector<std::string>& columns,
                                  const std::vector<std::string>& notes = {}) {
  std::string out = "# schema: " + schema + "/v1\n";
  for (const auto& n : notes) out += "# " + n + "\n";
  return out + join(columns) + "\n";
}

inline std::string equilibrium_line(const EquilibriumRow& r, bool with_timing) {
  return join({std::to_string(r.year), std::string(to_string(r.method)), num(r.married_share),
               num(r.prob_marriage), num(r.prob_divorce), num(r.utility_gap),
               r.b_star ? num(*r.b_star) : std::string(), std::to_string(r.n_grid),
               with_timing ? num(r.solve_ms, 6) : std::string()});
}

inline const std::string kAnnualizationNote =
    "ct prob_marriage/prob_divorce are annual probabilities 1 - exp(-hazard*dt)";

inline std::string equilibrium_csv(const std::string& schema, const std::vector<EquilibriumRow>& rows,
                                   bool with_timing) {
  std::string out = table_preamble(schema, kEquilibriumColumns, {kAnnualizationNote});
  for (const auto& r : rows) out += equilibrium_line(r, with_timing) + "\n";
  return out;
}

inline std::string bench_csv(const BenchResult& res) {
  std::string out = table_preamble(
      "bench", kBenchColumns,
      {"rows with n=slope carry log-log slopes: median_time_s=time slope, peak_bytes=memory slope",
       "timed-out cells have repeats < requested and are excluded from slopes"});
  for (const auto& c : res.cells) {
    out += join({std::string(to_string(c.method)), std::to_string(c.n), num(c.median_time_s, 6),
                 std::to_string(c.peak_bytes), std::to_string(c.repeats)}) +
           "\n";
  }
  for (const auto& s : res.slopes) {
    out += join({std::string(to_string(s.method)), "slope", num(s.time_slope, 6),
                 num(s.memory_slope, 6), ""}) +
           "\n";
  }
  return out;
}

inline std::string calibration_csv(const CalibrationResult& res) {
  std::string out = table_preamble("calibration_trace", kCalibrationColumns,
                                   {"best simplex vertex after each iteration"});
  for (const auto& s : res.trace) {
    out += join({std::to_string(s.iteration), num(s.loss, 12), num(s.ou.mu_m, 12),
                 num(s.ou.sigma_m2, 12), num(s.ou.eta, 12)}) +
           "\n";
  }
  return out;
}

/// Parsed table: comment lines stripped, first remaining line is the header.
struct CsvTable {
  std::string schema;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string tag = "# schema: ";
      if (line.rfind(tag, 0) == 0) t.schema = line.substr(tag.size());
      continue;
    }
    if (!have_header) {
      t.header = split_line(line);
      have_header = true;
    } else {
      t.rows.push_back(split_line(line));
    }
  }
  return t;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::InvalidInput, "cannot write " + path);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::InvalidInput, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace gghact::io
