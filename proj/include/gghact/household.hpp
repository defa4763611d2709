#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gghact/error.hpp"
#include "gghact/numerics/minimize.hpp"

namespace gghact {

/// Tastes over consumption and home output.
struct Preferences {
  double alpha = 0.278;  // consumption weight
  double zeta = -1.901;  // home-output curvature
  double cbar = 0.131;   // minimum consumption, per household
  double phi = 0.766;    // household-size scale exponent

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::InvalidParameter, "alpha must lie in (0,1)");
    if (!(zeta < 1.0) || zeta == 0.0) fail(ErrorCode::InvalidParameter, "zeta must be < 1 and nonzero");
    if (!(cbar >= 0.0)) fail(ErrorCode::InvalidParameter, "cbar must be >= 0");
    if (!std::isfinite(phi)) fail(ErrorCode::InvalidParameter, "phi must be finite");
  }
};

/// CES home production n = (theta d^kappa + (1-theta) h^kappa)^(1/kappa).
struct HomeTechnology {
  double theta = 0.206;
  double kappa = 0.189;

  void validate() const {
    if (!(theta > 0.0 && theta < 1.0)) fail(ErrorCode::InvalidParameter, "theta must lie in (0,1)");
    if (!(kappa < 1.0) || kappa == 0.0) fail(ErrorCode::InvalidParameter, "kappa must be < 1 and nonzero");
  }

  double output(double d, double h) const {
    return std::pow(theta * std::pow(d, kappa) + (1.0 - theta) * std::pow(h, kappa), 1.0 / kappa);
  }
};

struct Allocation {
  double c = 0.0;  // consumption
  double d = 0.0;  // home goods
  double h = 0.0;  // home hours
  double l = 0.0;  // market hours, z - h
  double n = 0.0;  // home output
  double value = 0.0;
  bool corner = false;  // optimum pressed against h -> 0 or the subsistence bound
};

/// Static utility of a bundle for a household of z adults.
inline double household_utility(const Preferences& prefs, const HomeTechnology& tech, double c,
                                double d, double h, int z) {
  const double scale = std::pow(static_cast<double>(z), prefs.phi);
  const double n = tech.output(d, h);
  return prefs.alpha * std::log((c - prefs.cbar) / scale) +
         (1.0 - prefs.alpha) / prefs.zeta * std::pow(n / scale, prefs.zeta);
}

/// Optimal (c, d, h) given the home-goods price p (relative to the wage) and wage w.
///
/// The intra-home first-order condition pins d/h = ((1-theta) p / theta)^(1/(kappa-1)); with d
/// eliminated this way and c taken from the budget c + w p d = w (z - h), the problem is a bracketed
/// one-dimensional search over h in (0, h_max) where h_max keeps c above cbar.
inline Allocation solve_allocation(const Preferences& prefs, const HomeTechnology& tech, double p,
                                   double w, int z) {
  prefs.validate();
  tech.validate();
  if (!(p > 0.0) || !(w > 0.0)) fail(ErrorCode::InvalidParameter, "prices must be positive");
  if (z != 1 && z != 2) fail(ErrorCode::InvalidParameter, "household size must be 1 or 2");
  const double endowment = static_cast<double>(z);
  if (!(w * endowment > prefs.cbar)) {
    fail(ErrorCode::InfeasibleBudget, "w*z=" + std::to_string(w * endowment) +
                                          " does not exceed cbar=" + std::to_string(prefs.cbar));
  }

  const double ratio = std::pow((1.0 - tech.theta) * p / tech.theta, 1.0 / (tech.kappa - 1.0));
  const double unit_cost = w * (1.0 + p * ratio);  // income lost per unit of h (with matching d)
  const double h_max = std::min(endowment, (w * endowment - prefs.cbar) / unit_cost);
  if (!(h_max > 0.0)) {
    fail(ErrorCode::NoInteriorOptimum, "no h in (0, z) keeps consumption above cbar");
  }

  auto bundle = [&](double h) {
    Allocation a;
    a.h = h;
    a.d = ratio * h;
    a.l = endowment - h;
    a.c = w * a.l - w * p * a.d;
    a.n = tech.output(a.d, a.h);
    return a;
  };
  auto neg_value = [&](double h) {
    const Allocation a = bundle(h);
    if (!(a.c > prefs.cbar) || !(h > 0.0)) return std::numeric_limits<double>::max();
    return -household_utility(prefs, tech, a.c, a.d, a.h, z);
  };

  constexpr double kEdge = 1e-10;
  const double lo = h_max * 1e-12;
  const double hi = h_max * (1.0 - 1e-12);
  const double h = num::minimize_scalar(neg_value, lo, hi, 1e-10 * h_max);

  Allocation a = bundle(h);
  a.value = household_utility(prefs, tech, a.c, a.d, a.h, z);
  a.corner = (h - lo) < kEdge || (hi - h) < kEdge;
  return a;
}

/// v(p, w, z)
inline double indirect_utility(const Preferences& prefs, const HomeTechnology& tech, double p,
                               double w, int z) {
  return solve_allocation(prefs, tech, p, w, z).value;
}

}  // namespace gghact
