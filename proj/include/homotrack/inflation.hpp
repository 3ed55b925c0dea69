#pragma once

// Inflated Newton solve: for a (nearly) singular Jacobian J, replace J du = -F by
// the consistent positive semi-definite system
//
//   [ J^T J      J^T J v ] [du~]     [ J^T F   ]
//   [ v^T J^T J  lam_min ] [ a ]  = -[ v^T J^T F ]
//
// with (lam_min, v) the smallest eigenpair of J^T J and du = du~ + a v.

#include "homotrack/model.hpp"
#include "homotrack/types.hpp"

namespace homotrack {

struct InflatedSystem {
  DenseMatrix matrix;
  Vector rhs;
  Vector v;
  double lambda_min = 0.0;
};

struct InflationUpdate {
  Vector delta_u_tilde;
  double alpha = 0.0;
  Vector delta_u;
  std::size_t iterations = 0;
  bool used_fallback = false;  ///< iterative solve hit its cap; a min-norm direct solve was used
};

[[nodiscard]] InflatedSystem assemble_inflated(const DenseMatrix& J, const Vector& F);

/// Gauss-Seidel from zero to `tol`; if the cap is hit, the minimum-norm solution
/// of the same singular system is used instead.
[[nodiscard]] InflationUpdate solve_inflated(const InflatedSystem& sys, double tol, std::size_t cap);

/// Splits a raw (n+1) solution into (du~, a, du).
[[nodiscard]] InflationUpdate split_inflated(const InflatedSystem& sys, const Vector& raw);

struct InflatedNewtonResult {
  Vector u;
  double residual = 0.0;
  std::size_t iterations = 0;
};

/// Corrector at fixed p built on repeated inflated solves.
/// Throws ConvergenceFailure (best iterate attached) when the cap is reached.
[[nodiscard]] InflatedNewtonResult inflated_newton(const ParametricSystem& sys, const Vector& u, double p,
                                                   const TrackerConfig& config);

/// Same iteration for any square residual map (used on bordered systems).
[[nodiscard]] InflatedNewtonResult inflated_newton(const std::function<Vector(const Vector&)>& residual,
                                                   const std::function<DenseMatrix(const Vector&)>& jacobian,
                                                   const Vector& z, double tol, const TrackerConfig& config);

}  // namespace homotrack
