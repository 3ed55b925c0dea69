#pragma once

#include <cstdint>
#include <vector>

#include "homotrack/linalg.hpp"

namespace homotrack {

/// One accepted sample on a solution path.
struct PathPoint {
  Vector u;
  double p = 0.0;
  double lambda_min = 0.0;  ///< signed real part of the smallest-|Re| eigenvalue of F_u
  double residual = 0.0;    ///< max-norm of F(u, p)
  std::size_t index = 0;
  int det_sign = 0;  ///< sign of det F_u (0 when singular); used for crossing detection
};

/// Every tolerance and cap used by the trackers, endgame and branch switching.
struct TrackerConfig {
  double h = -0.1;
  double p_end = 0.0;
  double newton_tol = 1e-10;
  std::size_t newton_cap = 20;
  double pse_zone = 0.1;
  double ill_cond_lambda = 1e-6;
  std::size_t max_steps = 10000;
  int winding_max = 6;
  double k1 = 0.5;
  double k2 = 0.25;
  std::uint64_t rng_seed = 0;

  EigenOptions eigen{};
  double null_cutoff = 1e-8;
  /// Calibration redraws p~ while |lambda~| < calibration_floor * |lambda at the start|.
  double calibration_floor = 0.5;
  std::size_t calibration_draws = 10;

  /// Gauss-Seidel stop for the inflated system, relative to ||rhs||_2.
  double inflation_tol = 1e-12;
  std::size_t inflation_cap = 500;
  std::size_t inflation_newton_cap = 50;

  std::size_t pse_samples = 5;
  std::size_t pse_rounds = 12;
  double pse_tol = 1e-6;

  std::size_t grow_after = 3;
  double min_h = 1e-9;
  std::size_t corrector_cap = 10;

  /// Validates the invariants; throws NumericalError(InvalidConfig).
  void validate() const;
};

}  // namespace homotrack
