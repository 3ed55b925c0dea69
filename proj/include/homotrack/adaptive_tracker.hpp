#pragma once

// Adaptive tracking on the augmented system
//
//   F(u, p) = 0
//   g v^T (u - u0)(1 - s) + s (p - p0) - h = 0
//
// with s = min(1, |lambda_min / lambda~|) and g = sign(-v^T F_u^{-1} F_p) / ||F_u~^{-1} F_p~||.
// Far from singular points (s = 1) it steps in p; near them (s -> 0) it steps along
// the critical eigenvector v instead.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "homotrack/model.hpp"
#include "homotrack/types.hpp"

namespace homotrack {

struct GenericCalibration {
  double p_tilde = 0.0;
  Vector u_tilde;
  double lambda_tilde = 0.0;     ///< |Re| of the smallest eigenvalue at (u~, p~)
  double newton_dir_norm = 0.0;  ///< ||F_u^{-1} F_p|| at (u~, p~)
  std::size_t draws = 0;
};

struct StepState {
  PathPoint point;
  Vector v;
  double s = 1.0;
  double g = 1.0;
};

/// Evaluates residual, smallest eigenvalue and det sign at (u, p).
[[nodiscard]] PathPoint annotate_point(const ParametricSystem& sys, const Vector& u, double p,
                                       const TrackerConfig& config, std::size_t index = 0);

/// Calibration at a given p~: continues from `start` to p~ (keeping the furthest point
/// reached if the path ends early) and measures lambda~ and ||F_u^{-1} F_p||.
[[nodiscard]] GenericCalibration calibrate_at(const ParametricSystem& sys, const PathPoint& start, double p_tilde,
                                              const TrackerConfig& config);

/// Draws p~ uniformly from [p0, p_end] with the config seed, redrawing while
/// |lambda~| < calibration_floor * |lambda at start|. When every draw lands near a
/// singular point the start itself serves as the generic point.
/// Throws CalibrationFailed for an empty interval or a singular start.
[[nodiscard]] GenericCalibration calibrate(const ParametricSystem& sys, const PathPoint& start,
                                           const TrackerConfig& config);

[[nodiscard]] Vector augmented_residual(const ParametricSystem& sys, const StepState& state0, const Vector& u,
                                        double p, double h);
[[nodiscard]] DenseMatrix augmented_jacobian(const ParametricSystem& sys, const StepState& state0, const Vector& u,
                                             double p);

enum class StepStatus { Accepted, NeedsInflation };

struct StepResult {
  StepStatus status = StepStatus::Accepted;
  Vector u;
  double p = 0.0;
  std::size_t iterations = 0;
  std::string reason;
};

/// Newton on the augmented system from the tangent predictor of the same system.
[[nodiscard]] StepResult newton_step_augmented(const ParametricSystem& sys, const StepState& state0, double h,
                                               const TrackerConfig& config);

enum class TrackStop { ReachedEnd, PseZone, Crossing, MaxSteps, StepFailed, Hook };

[[nodiscard]] const char* to_string(TrackStop stop) noexcept;

struct TrackOptions {
  bool stop_in_pse_zone = true;
  /// When false the zone test is disarmed until |lambda| first exceeds the zone
  /// threshold or the path moves `arm_distance` away from its start.
  bool armed = true;
  double arm_distance = 0.0;
  /// A det F_u sign change between steps is bisected back into the PSE zone.
  bool refine_crossings = true;
  std::function<bool(const PathPoint&)> stop_when;
};

struct TrackResult {
  std::vector<PathPoint> points;
  TrackStop stop = TrackStop::ReachedEnd;
  GenericCalibration calibration;
  std::size_t attempts = 0;         ///< augmented solves, accepted or not
  std::size_t inflation_steps = 0;  ///< accepted steps that needed the inflated corrector
  Vector last_v;
};

/// Stateful stepper shared by tracking and the endgame sampler.
class AdaptiveTracker {
 public:
  AdaptiveTracker(const ParametricSystem& sys, TrackerConfig config, GenericCalibration calibration);

  [[nodiscard]] const TrackerConfig& config() const noexcept { return config_; }
  [[nodiscard]] const GenericCalibration& calibration() const noexcept { return calibration_; }
  [[nodiscard]] const ParametricSystem& system() const noexcept { return sys_; }

  /// Eigenvector (sign-continued), s and g at an accepted point.
  [[nodiscard]] StepState state_at(const PathPoint& point);

  /// One augmented step of size h with the inflation fallback. Counts one attempt.
  [[nodiscard]] std::optional<PathPoint> step(const StepState& state, double h);

  [[nodiscard]] TrackResult track(const PathPoint& start, const TrackOptions& options = {});

  [[nodiscard]] std::size_t attempts() const noexcept { return attempts_; }
  [[nodiscard]] std::size_t inflation_steps() const noexcept { return inflation_steps_; }
  [[nodiscard]] double zone_threshold() const noexcept { return config_.pse_zone * calibration_.lambda_tilde; }
  void reset_direction(const Vector& v) { last_v_ = v; }

 private:
  const ParametricSystem& sys_;
  TrackerConfig config_;
  GenericCalibration calibration_;
  Vector last_v_;
  std::size_t attempts_ = 0;
  std::size_t inflation_steps_ = 0;
};

/// Calibrates and tracks in one call.
[[nodiscard]] TrackResult track(const ParametricSystem& sys, const PathPoint& start, const TrackerConfig& config,
                                const TrackOptions& options = {});

}  // namespace homotrack
