#pragma once

// Puiseux-series endgame. Near a singular point the path is parameterized by
// lambda = min_i |Re lambda_i(F_u)|:
//
//   u(lambda) = u_b + sum_{j=1..J} a_j lambda^{j/c1},   p(lambda) = p_b + sum_j b_j lambda^{j/c2}
//
// Windings are chosen by holding out the smallest-lambda sample; (u_b, p_b) is the
// constant term, refined by sampling again at half the last lambda.

#include <optional>
#include <vector>

#include "homotrack/adaptive_tracker.hpp"

namespace homotrack {

struct EndgameSample {
  double lambda = 0.0;  ///< |Re| of the smallest eigenvalue, >= 0
  Vector u;
  double p = 0.0;
};

struct PuiseuxModel {
  int c = 1;
  int terms = 1;
  Vector constant;           ///< y_b (one entry per series component)
  DenseMatrix coefficients;  ///< terms x components; row j-1 multiplies lambda^{j/c}
  double residual = 0.0;     ///< max-norm least-squares residual over the fitted samples

  [[nodiscard]] Vector evaluate(double lambda) const;
};

enum class BifurcationKind { BranchPoint, Fold, Unclassified };

[[nodiscard]] const char* to_string(BifurcationKind kind) noexcept;

struct BifurcationRecord {
  Vector u_b;
  double p_b = 0.0;
  int c1 = 1;
  int c2 = 1;
  double exponent_u = 0.0;  ///< leading exponent of alpha^T u (NaN when not estimable)
  double exponent_p = 0.0;  ///< leading exponent q/c2 of p
  double holdout_error = 0.0;
  std::size_t samples_used = 0;
  std::size_t rounds = 0;
  bool converged = false;
  double residual = 0.0;  ///< max-norm of F(u_b, p_b)
  BifurcationKind kind = BifurcationKind::Unclassified;
  std::vector<PathPoint> new_samples;  ///< points generated while refining
};

/// Root of 1 - k1^x - m (1 - k2^x) on (0, 10], m = (y0 - y1)/(y0 - y2).
/// Throws NumericalError(NoRoot) when m is outside the attainable range.
[[nodiscard]] double estimate_leading_exponent(double y0, double y1, double y2, double k1, double k2);

/// Least squares y ~ y_b + sum_{j=1..terms} coef_j lambda^{j/c}; `values` has one row per sample.
/// Throws NumericalError(IllConditionedFit) when the column-scaled design has condition > 1e12.
[[nodiscard]] PuiseuxModel fit_puiseux(const std::vector<double>& lambdas, const DenseMatrix& values, int c,
                                       int terms);

struct WindingChoice {
  int c = 1;
  PuiseuxModel model;  ///< refit on every sample with the chosen winding
  double holdout_error = 0.0;
  std::vector<double> errors;  ///< per candidate c = 1..M (infinity when the fit failed)
};

/// Holdout selection over c = 1..max_c. Ties (relative 1e-9) go to the smaller c.
[[nodiscard]] WindingChoice select_winding(const std::vector<double>& lambdas, const DenseMatrix& values, int max_c,
                                           int terms);

/// Number of series terms for a window of `samples` points.
[[nodiscard]] int default_terms(std::size_t samples);

/// Monotone cubic (Fritsch-Carlson) interpolation through (xs, ys), xs strictly increasing.
[[nodiscard]] double pchip(const std::vector<double>& xs, const std::vector<double>& ys, double x);

/// Leading exponent from interpolated values at lambda_a, k1 lambda_a, k2 lambda_a.
[[nodiscard]] std::optional<double> exponent_from_samples(const std::vector<double>& lambdas,
                                                          const std::vector<double>& ys, double k1, double k2);

/// One extrapolation from a fixed window (no new samples).
[[nodiscard]] BifurcationRecord extrapolate(const ParametricSystem& sys, const std::vector<EndgameSample>& samples,
                                            const TrackerConfig& config);

/// Trailing points of a path whose |lambda| decreases strictly toward the end (at most `count`).
[[nodiscard]] std::vector<PathPoint> endgame_window(const std::vector<PathPoint>& path, std::size_t count);

/// Full endgame: extrapolate, add a sample near half the last |lambda|, repeat until
/// successive extrapolations agree within pse_tol or pse_rounds is reached.
[[nodiscard]] BifurcationRecord refine_bifurcation(AdaptiveTracker& tracker, const std::vector<PathPoint>& window);

}  // namespace homotrack
