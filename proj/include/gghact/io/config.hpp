#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gghact/error.hpp"
#include "gghact/experiments.hpp"
#include "gghact/params.hpp"

namespace gghact::io {

struct GridSettings {
  std::size_t n = 501;
  double n_std = 5.0;
};

struct SolverOptions {
  double tol = 1e-9;
  std::size_t max_iter = 100000;
  double pseudo_step = 100.0;
  double damping = 0.5;
};

/// Everything a CLI run needs. Variances (sigma_s2, sigma_m2) are stored as variances; the process
/// types expose sd() for the single conversion point.
struct RunConfig {
  ModelParams params;
  GridSettings grid;
  SolverOptions solver;
  TrendPath trend;
  BenchSettings bench;
  CalibrationSettings calibration;
  OuProcess calibration_start{0.521, 0.680, 0.11};
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  /// One line per field: "key = value  [source]".
  std::vector<std::string> provenance;

  SolverSettings solver_settings() const {
    SolverSettings s;
    s.dt.n = grid.n;
    s.dt.tol = solver.tol;
    s.dt.max_iter = solver.max_iter;
    s.ct.n = grid.n;
    s.ct.n_std = grid.n_std;
    s.ct.tol = solver.tol;
    s.ct.max_inner = solver.max_iter;
    s.ct.pseudo_step = solver.pseudo_step;
    s.ct.damping = solver.damping;
    return s;
  }
};

inline constexpr std::string_view kSourceBaseline = "baseline calibration";
inline constexpr std::string_view kSourceCtEstimate = "CT OU estimate";
inline constexpr std::string_view kSourceNormalization = "lambda*dt = 1 normalization";
inline constexpr std::string_view kSourceSolver = "solver default";
inline constexpr std::string_view kSourceConfig = "config";

namespace detail {

using json = nlohmann::json;

struct Field {
  std::string_view source;
  std::function<void(const json&, const std::string&)> assign;
  std::function<std::string()> show;
};

inline std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

[[noreturn]] inline void domain(const std::string& key, const std::string& bound) {
  fail(ErrorCode::DomainError, key + " must be " + bound);
}

inline double as_number(const json& j, const std::string& key) {
  if (!j.is_number()) fail(ErrorCode::DomainError, key + " must be a number");
  return j.get<double>();
}

inline std::size_t as_count(const json& j, const std::string& key) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    fail(ErrorCode::DomainError, key + " must be a non-negative integer");
  }
  return j.get<std::size_t>();
}

template <class Pred>
Field real(double& target, std::string_view source, Pred ok, std::string bound) {
  return {source,
          [&target, ok, bound](const json& j, const std::string& key) {
            const double v = as_number(j, key);
            if (!ok(v)) domain(key, bound);
            target = v;
          },
          [&target] { return fmt_double(target); }};
}

inline auto any_finite = [](double v) { return std::isfinite(v); };
inline auto positive = [](double v) { return v > 0.0; };
inline auto unit_open = [](double v) { return v > 0.0 && v < 1.0; };

inline std::map<std::string, Field> fields(RunConfig& c) {
  using std::string_view;
  const string_view base = kSourceBaseline;
  const string_view ct = kSourceCtEstimate;
  const string_view sol = kSourceSolver;
  auto below_one_nonzero = [](double v) { return v < 1.0 && v != 0.0; };
  std::map<std::string, Field> f;
  auto& p = c.params;
  f["params.beta_tilde"] = real(p.beta_tilde, base, unit_open, "in (0,1)");
  f["params.phi"] = real(p.prefs.phi, base, any_finite, "finite");
  f["params.alpha"] = real(p.prefs.alpha, base, unit_open, "in (0,1)");
  f["params.zeta"] = real(p.prefs.zeta, base, below_one_nonzero, "< 1 and nonzero");
  f["params.cbar"] = real(p.prefs.cbar, base, [](double v) { return v >= 0.0; }, ">= 0");
  f["params.theta"] = real(p.tech.theta, base, unit_open, "in (0,1)");
  f["params.kappa"] = real(p.tech.kappa, base, below_one_nonzero, "< 1 and nonzero");
  f["params.life_span"] = real(p.life_span, base, [](double v) { return v > 1.0; }, "> 1");
  f["params.mu_s"] = real(p.singles.mu_s, base, any_finite, "finite");
  f["params.sigma_s2"] = real(p.singles.sigma_s2, base, positive, "> 0");
  f["params.mu_m"] = real(p.ar1.mu_m, base, any_finite, "finite");
  f["params.sigma_m2"] = real(p.ar1.sigma_m2, base, positive, "> 0");
  f["params.rho_ar"] = real(p.ar1.rho_ar, base, [](double v) { return std::abs(v) < 1.0; },
                            "in (-1,1)");
  f["params.lambda"] = real(p.lambda, kSourceNormalization, [](double v) { return v >= 0.0; },
                            ">= 0");
  f["params.dt"] = real(p.dt, kSourceNormalization, positive, "> 0");
  f["ou.mu_m"] = real(p.ou.mu_m, ct, any_finite, "finite");
  f["ou.sigma_m2"] = real(p.ou.sigma_m2, ct, positive, "> 0");
  f["ou.eta"] = real(p.ou.eta, ct, positive, "> 0");

  f["grid.n"] = {sol,
                 [&c](const json& j, const std::string& key) {
                   const std::size_t n = as_count(j, key);
                   if (n < 3) domain(key, ">= 3");
                   c.grid.n = n;
                 },
                 [&c] { return std::to_string(c.grid.n); }};
  f["grid.n_std"] = real(c.grid.n_std, sol, positive, "> 0");
  f["solver.tol"] = real(c.solver.tol, sol, positive, "> 0");
  f["solver.max_iter"] = {sol,
                          [&c](const json& j, const std::string& key) {
                            const std::size_t n = as_count(j, key);
                            if (n < 1) domain(key, ">= 1");
                            c.solver.max_iter = n;
                          },
                          [&c] { return std::to_string(c.solver.max_iter); }};
  f["solver.pseudo_step"] = real(c.solver.pseudo_step, sol, positive, "> 0");
  f["solver.damping"] = real(c.solver.damping, sol, [](double v) { return v > 0.0 && v <= 1.0; },
                             "in (0,1]");

  auto& t = c.trend;
  f["trend.w_1950"] = real(t.w_1950, base, positive, "> 0");
  f["trend.dw"] = real(t.dw, base, [](double v) { return v > -1.0; }, "> -1");
  f["trend.p_1950"] = real(t.p_1950, base, positive, "> 0");
  f["trend.dp"] = real(t.dp, base, [](double v) { return v > -1.0; }, "> -1");
  auto year_field = [&](int& target) {
    return Field{sol,
                 [&target](const json& j, const std::string& key) {
                   if (!j.is_number_integer() || j.get<int>() < 1950) domain(key, "an integer >= 1950");
                   target = j.get<int>();
                 },
                 [&target] { return std::to_string(target); }};
  };
  f["trend.first_year"] = year_field(t.first_year);
  f["trend.last_year"] = year_field(t.last_year);
  f["trend.form"] = {sol,
                     [&t](const json& j, const std::string& key) {
                       if (j == "geometric") t.form = TrendForm::geometric;
                       else if (j == "linear") t.form = TrendForm::linear;
                       else domain(key, "\"geometric\" or \"linear\"");
                     },
                     [&t] { return std::string(t.form == TrendForm::geometric ? "geometric" : "linear"); }};

  f["bench.n_values"] = {sol,
                         [&c](const json& j, const std::string& key) {
                           if (!j.is_array() || j.size() < 4) domain(key, "an array of >= 4 sizes");
                           std::vector<std::size_t> v;
                           for (const auto& e : j) {
                             const std::size_t n = as_count(e, key);
                             if (n < 3 || (!v.empty() && n <= v.back())) {
                               domain(key, "strictly increasing and >= 3");
                             }
                             v.push_back(n);
                           }
                           c.bench.n_values = std::move(v);
                         },
                         [&c] {
                           std::string s = "[";
                           for (std::size_t i = 0; i < c.bench.n_values.size(); ++i) {
                             s += (i ? ", " : "") + std::to_string(c.bench.n_values[i]);
                           }
                           return s + "]";
                         }};
  f["bench.repeats"] = {sol,
                        [&c](const json& j, const std::string& key) {
                          const std::size_t n = as_count(j, key);
                          if (n < 3) domain(key, ">= 3");
                          c.bench.repeats = n;
                        },
                        [&c] { return std::to_string(c.bench.repeats); }};
  f["bench.timeout_s"] = real(c.bench.timeout_s, sol, positive, "> 0");
  f["bench.methods"] = {sol,
                        [&c](const json& j, const std::string& key) {
                          if (!j.is_array() || j.empty()) domain(key, "a non-empty array of \"ct\"/\"dt\"");
                          std::vector<Method> ms;
                          for (const auto& e : j) {
                            if (e == "ct") ms.push_back(Method::ct);
                            else if (e == "dt") ms.push_back(Method::dt);
                            else domain(key, "a non-empty array of \"ct\"/\"dt\"");
                          }
                          c.bench.methods = std::move(ms);
                        },
                        [&c] {
                          std::string s = "[";
                          for (std::size_t i = 0; i < c.bench.methods.size(); ++i) {
                            s += (i ? ", " : "") + std::string(to_string(c.bench.methods[i]));
                          }
                          return s + "]";
                        }};

  auto moments_field = [&](Moments& target, std::string_view source, bool strictly_positive) {
    return Field{source,
                 [&target, strictly_positive](const json& j, const std::string& key) {
                   if (!j.is_array() || j.size() != 6) domain(key, "an array of 6 numbers");
                   Moments m{};
                   for (std::size_t i = 0; i < 6; ++i) {
                     m[i] = as_number(j[i], key);
                     if (strictly_positive ? !(m[i] > 0.0) : !(m[i] >= 0.0)) {
                       domain(key, strictly_positive ? "all > 0" : "all >= 0");
                     }
                   }
                   target = m;
                 },
                 [&target] {
                   std::string s = "[";
                   for (std::size_t i = 0; i < 6; ++i) s += (i ? ", " : "") + fmt_double(target[i]);
                   return s + "]";
                 }};
  };
  f["calibrate.targets"] = moments_field(c.calibration.targets, "vital statistics data", true);
  f["calibrate.weights"] = moments_field(c.calibration.weights, sol, false);
  f["calibrate.tol"] = real(c.calibration.tol, sol, positive, "> 0");
  f["calibrate.max_iter"] = {sol,
                             [&c](const json& j, const std::string& key) {
                               c.calibration.max_iter = as_count(j, key);
                             },
                             [&c] { return std::to_string(c.calibration.max_iter); }};
  f["calibrate.step"] = real(c.calibration.step, sol, positive, "> 0");
  f["calibrate.start.mu_m"] = real(c.calibration_start.mu_m, base, any_finite, "finite");
  f["calibrate.start.sigma_m2"] = real(c.calibration_start.sigma_m2, base, positive, "> 0");
  f["calibrate.start.eta"] = real(c.calibration_start.eta, base, positive, "> 0");

  f["output_dir"] = {sol,
                     [&c](const json& j, const std::string& key) {
                       if (!j.is_string()) domain(key, "a string");
                       c.output_dir = j.get<std::string>();
                     },
                     [&c] { return c.output_dir; }};
  f["seed"] = {sol,
               [&c](const json& j, const std::string& key) {
                 if (!j.is_number_unsigned()) domain(key, "a non-negative integer");
                 c.seed = j.get<std::uint64_t>();
               },
               [&c] { return std::to_string(c.seed); }};
  return f;
}

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline bool is_group(const std::map<std::string, Field>& f, const std::string& prefix) {
  const std::string dotted = prefix + ".";
  const auto it = f.lower_bound(dotted);
  return it != f.end() && it->first.compare(0, dotted.size(), dotted) == 0;
}

inline void apply(const json& node, const std::string& prefix, std::map<std::string, Field>& f,
                  std::map<std::string, bool>& touched) {
  for (const auto& [key, value] : node.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (auto it = f.find(path); it != f.end()) {
      it->second.assign(value, path);
      touched[path] = true;
    } else if (is_group(f, path)) {
      if (!value.is_object()) fail(ErrorCode::DomainError, path + " must be an object");
      apply(value, path, f, touched);
    } else {
      fail(ErrorCode::UnknownKey, path);
    }
  }
}

}  // namespace detail

/// Parses a JSON document (comments allowed) into a RunConfig. Omitted fields keep their defaults;
/// unknown keys are rejected.
inline RunConfig parse_config(std::string_view text) {
  using detail::json;
  RunConfig cfg;
  json doc = json::object();
  if (text.find_first_not_of(" \t\r\n") != std::string_view::npos) {
    try {
      doc = json::parse(text.begin(), text.end(), nullptr, true, true);
    } catch (const json::parse_error& e) {
      const auto [line, col] = detail::line_column(text, e.byte > 0 ? e.byte - 1 : 0);
      fail(ErrorCode::ParseError, "line " + std::to_string(line) + ", column " +
                                      std::to_string(col) + ": " + e.what());
    }
  }
  if (!doc.is_object()) fail(ErrorCode::ParseError, "line 1, column 1: top level must be an object");

  auto fields = detail::fields(cfg);
  std::map<std::string, bool> touched;
  detail::apply(doc, "", fields, touched);

  if (cfg.trend.last_year < cfg.trend.first_year) {
    fail(ErrorCode::DomainError, "trend.last_year must be >= trend.first_year");
  }
  try {
    cfg.params.validate();
  } catch (const Error& e) {
    fail(ErrorCode::DomainError, e.detail());
  }

  for (const auto& [key, field] : fields) {
    const bool overridden = touched.count(key) > 0;
    cfg.provenance.push_back(key + " = " + field.show() + "  [" +
                             std::string(overridden ? kSourceConfig : field.source) + "]");
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

/// Config fragment overriding the OU process; parse_config accepts it as a document.
inline std::string ou_overrides_json(const OuProcess& ou) {
  detail::json j;
  j["ou"]["mu_m"] = ou.mu_m;
  j["ou"]["sigma_m2"] = ou.sigma_m2;
  j["ou"]["eta"] = ou.eta;
  return j.dump(2) + "\n";
}

}  // namespace gghact::io
