#pragma once

// Classical natural-parameter continuation: Euler predictor, Newton corrector at
// fixed p, trial-and-error step control (halve on failure, double after repeated
// successes). It stops at folds once the step falls below min_h.

#include <vector>

#include "homotrack/model.hpp"
#include "homotrack/types.hpp"

namespace homotrack {

/// u0 + du with F_u du = -F_p dp. Throws SingularMatrix.
[[nodiscard]] Vector euler_predict(const ParametricSystem& sys, const Vector& u0, double p0, double dp);

struct CorrectResult {
  Vector u;
  double residual = 0.0;
  std::size_t iterations = 0;
};

/// Newton at fixed p. Fails (ConvergenceFailure) on a residual increase, a singular
/// Jacobian, or when `cap` iterations are exhausted.
[[nodiscard]] CorrectResult newton_correct(const ParametricSystem& sys, const Vector& u_pred, double p, double tol,
                                           std::size_t cap);

enum class BaselineStop { ReachedEnd, Stagnated, MaxSteps };

[[nodiscard]] const char* to_string(BaselineStop stop) noexcept;

struct BaselineOptions {
  /// Treat a det F_u sign change as a failed step, shrink onto it, then jump across.
  bool detect_crossings = true;
};

struct BaselineResult {
  std::vector<PathPoint> points;
  std::vector<std::size_t> attempts_at;  ///< cumulative attempts when each point was accepted
  BaselineStop stop = BaselineStop::ReachedEnd;
  std::size_t attempts = 0;  ///< predictor-corrector attempts, accepted or not
  std::vector<PathPoint> crossings;  ///< localized sign changes of det F_u
  std::vector<std::size_t> crossing_attempts;  ///< attempts spent when each crossing was localized
  double final_h = 0.0;                        ///< step size at stagnation
  PathPoint stagnation;              ///< last accepted point when stop == Stagnated
  std::vector<double> step_sizes;    ///< |h| used for every attempt
  std::size_t zeroth_order_predictions = 0;
};

[[nodiscard]] BaselineResult track_trial_and_error(const ParametricSystem& sys, const PathPoint& start,
                                                   const TrackerConfig& config, const BaselineOptions& options = {});

}  // namespace homotrack
