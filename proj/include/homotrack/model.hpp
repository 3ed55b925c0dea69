#pragma once

// Parametric systems F(u, p) = 0 and the registry of built-in test problems.

#include <functional>
#include <string>
#include <vector>

#include "homotrack/linalg.hpp"

namespace homotrack {

/// A map F: R^n x R -> R^n with optional analytic Jacobians. Immutable once built.
struct ParametricSystem {
  using Residual = std::function<Vector(const Vector&, double)>;
  using StateJacobian = std::function<DenseMatrix(const Vector&, double)>;
  using ParamJacobian = std::function<Vector(const Vector&, double)>;

  std::string name;
  std::size_t dimension = 0;
  Residual evaluator;
  StateJacobian analytic_jacobian_u;  ///< empty -> central differences
  ParamJacobian analytic_jacobian_p;  ///< empty -> central differences

  [[nodiscard]] Vector evaluate(const Vector& u, double p) const;
  [[nodiscard]] DenseMatrix jacobian_u(const Vector& u, double p) const;
  [[nodiscard]] Vector jacobian_p(const Vector& u, double p) const;
  /// [F_u, F_p] as one n x (n+1) block.
  [[nodiscard]] DenseMatrix jacobian_full(const Vector& u, double p) const;

  [[nodiscard]] double residual_norm(const Vector& u, double p) const { return max_norm(evaluate(u, p)); }
};

/// Central-difference derivatives with step `scale * max(1, |x_i|)`.
[[nodiscard]] DenseMatrix fd_jacobian_u(const ParametricSystem& sys, const Vector& u, double p,
                                        double scale = 1e-6);
[[nodiscard]] Vector fd_jacobian_p(const ParametricSystem& sys, const Vector& u, double p, double scale = 1e-6);

struct JacobianCheck {
  double max_relative_error_u = 0.0;
  double max_relative_error_p = 0.0;
  std::size_t probes = 0;
};

/// Compares analytic Jacobians with central differences at `probes` random points
/// drawn around `center` (radius `spread`).
[[nodiscard]] JacobianCheck validate_jacobians(const ParametricSystem& sys, const Vector& center, double p_center,
                                               double spread, std::size_t probes, unsigned seed);

/// Construction knobs for the registry; unused fields are ignored by analytic problems.
struct ProblemParams {
  std::size_t grid_n = 0;  ///< 0 -> problem default
  double d = 0.35;  ///< competition dispersal rate
  std::size_t branch = 2;  ///< pde1d start branch (1 = trivial)
};

struct RegistryEntry {
  std::string name;
  std::string description;
  ParametricSystem system;
  Vector start_u;
  double start_p = 0.0;
  double p_min = 0.0;  ///< default tracking window
  double p_max = 0.0;
  double default_h = 0.1;
  double newton_tol = 1e-10;
  std::size_t branch_depth = 1;      ///< default depth of branch switching
  std::size_t stop_after_folds = 0;  ///< end a branch after this many folds (0: never)
};

[[nodiscard]] const std::vector<std::string>& problem_names();

/// The system alone. Throws NumericalError(UnknownProblem).
[[nodiscard]] ParametricSystem builtin(const std::string& name, const ProblemParams& params = {});

/// One-line description. Throws NumericalError(UnknownProblem).
[[nodiscard]] const std::string& problem_description(const std::string& name);

/// System plus its documented start point and defaults. PDE starts are computed.
[[nodiscard]] RegistryEntry registry_entry(const std::string& name, const ProblemParams& params = {});

/// Default end parameter for a run that steps with `h` from the entry's start.
[[nodiscard]] double default_p_end(const RegistryEntry& entry, double h);

}  // namespace homotrack
