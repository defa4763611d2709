#pragma once

#include <cmath>
#include <string>

#include "gghact/error.hpp"
#include "gghact/household.hpp"
#include "gghact/match_process.hpp"

namespace gghact {

/// Structural parameters for one model economy. Defaults are the baseline
/// with the continuous-time OU process re-estimated against the 1950/2000 vital statistics.
struct ModelParams {
  Preferences prefs;
  HomeTechnology tech;
  double beta_tilde = 0.96;
  double life_span = 47.0;  // 1/delta, periods
  SinglesDraw singles;
  Ar1Process ar1;
  OuProcess ou;
  double lambda = 1.0;  // CT meeting rate; lambda * dt = 1 mirrors one meeting per DT period
  double dt = 1.0;

  double delta() const { return 1.0 / life_span; }
  Demographics demographics() const { return make_demographics(delta(), beta_tilde, lambda, dt); }

  void validate() const {
    prefs.validate();
    tech.validate();
    singles.validate();
    ar1.validate();
    ou.validate();
    if (!(life_span > 1.0)) fail(ErrorCode::InvalidParameter, "life_span must be > 1");
    (void)demographics();
  }
};

/// Naive OU parameters: AR(1) mean and variance with eta = -log(rho_ar)/dt.
inline OuProcess naive_ou(const ModelParams& params) {
  return {params.ar1.mu_m, params.ar1.sigma_m2, -std::log(params.ar1.rho_ar) / params.dt};
}

struct Prices {
  double w = 1.0;
  double p = 1.0;
};

/// Indirect utilities of single (z=1) and married (z=2) households at given prices.
struct HouseholdValues {
  double single = 0.0;
  double married = 0.0;
  double gap() const { return married - single; }
};

inline HouseholdValues household_values(const ModelParams& params, const Prices& prices) {
  return {indirect_utility(params.prefs, params.tech, prices.p, prices.w, 1),
          indirect_utility(params.prefs, params.tech, prices.p, prices.w, 2)};
}

}  // namespace gghact
