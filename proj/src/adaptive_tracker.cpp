#include "homotrack/adaptive_tracker.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "homotrack/inflation.hpp"

namespace homotrack {

const char* to_string(TrackStop stop) noexcept {
  switch (stop) {
    case TrackStop::ReachedEnd: return "reached_end";
    case TrackStop::PseZone: return "pse_zone";
    case TrackStop::Crossing: return "crossing";
    case TrackStop::MaxSteps: return "max_steps";
    case TrackStop::StepFailed: return "step_failed";
    case TrackStop::Hook: return "stopped";
  }
  return "unknown";
}

void TrackerConfig::validate() const {
  auto fail = [](const std::string& what) { throw NumericalError(ErrorKind::InvalidConfig, what); };
  if (h == 0.0 || !std::isfinite(h)) fail("h must be a nonzero finite number");
  if (!(pse_zone > 0.0 && pse_zone < 1.0)) fail("pse_zone must lie in (0, 1)");
  if (!(k1 > 0.0 && k1 < 1.0 && k2 > 0.0 && k2 < 1.0) || k1 == k2) fail("k1, k2 must be distinct values in (0, 1)");
  if (!(newton_tol > 0.0)) fail("newton_tol must be positive");
  if (winding_max < 1) fail("winding_max must be at least 1");
  if (pse_samples < 3) fail("pse_samples must be at least 3");
}

PathPoint annotate_point(const ParametricSystem& sys, const Vector& u, double p, const TrackerConfig& config,
                         std::size_t index) {
  PathPoint pt;
  pt.u = u;
  pt.p = p;
  pt.index = index;
  pt.residual = sys.residual_norm(u, p);
  const DenseMatrix J = sys.jacobian_u(u, p);
  pt.lambda_min = min_abs_real_eigenpair(J, config.eigen).value.real();
  pt.det_sign = determinant_sign(J);
  return pt;
}

namespace {

// Natural-parameter continuation with an Euler predictor; stops early (keeping the
// furthest point) when the step would have to shrink below a tiny fraction.
std::pair<Vector, double> continue_to(const ParametricSystem& sys, const Vector& u0, double p0, double target,
                                      const TrackerConfig& config) {
  Vector u = u0;
  double p = p0;
  const double span = std::abs(target - p0);
  double dp = std::copysign(std::min(std::abs(config.h), span), target - p0);
  const double smallest = 1e-6 * std::max(span, 1e-12);
  const double tol = config.newton_tol;
  while (std::abs(target - p) > 0.0 && std::abs(dp) >= smallest) {
    if (std::abs(target - p) < std::abs(dp)) dp = target - p;
    Vector trial;
    bool ok = false;
    try {
      const LuSolver lu(sys.jacobian_u(u, p));
      trial = u - lu.solve(Vector(sys.jacobian_p(u, p) * dp));
      const double q = p + dp;
      double res = sys.residual_norm(trial, q);
      for (std::size_t it = 0; it < config.newton_cap && res > tol && std::isfinite(res); ++it) {
        trial -= LuSolver(sys.jacobian_u(trial, q)).solve(sys.evaluate(trial, q));
        res = sys.residual_norm(trial, q);
      }
      ok = res <= tol && max_norm(trial - u) <= 10.0 * (1.0 + max_norm(u));
    } catch (const NumericalError&) {
      ok = false;
    }
    if (ok) {
      u = trial;
      p += dp;
    } else {
      dp /= 2.0;
    }
  }
  return {u, p};
}

std::optional<GenericCalibration> measure(const ParametricSystem& sys, const Vector& u, double p,
                                          const TrackerConfig& config) {
  try {
    const DenseMatrix J = sys.jacobian_u(u, p);
    const Vector w = LuSolver(J).solve(sys.jacobian_p(u, p));
    GenericCalibration c;
    c.p_tilde = p;
    c.u_tilde = u;
    c.lambda_tilde = std::abs(min_abs_real_eigenpair(J, config.eigen).value.real());
    c.newton_dir_norm = w.norm();
    if (!(c.lambda_tilde > 0.0) || !std::isfinite(c.newton_dir_norm) || !(c.newton_dir_norm > 0.0)) {
      return std::nullopt;
    }
    return c;
  } catch (const NumericalError&) {
    return std::nullopt;
  }
}

}  // namespace

GenericCalibration calibrate_at(const ParametricSystem& sys, const PathPoint& start, double p_tilde,
                                const TrackerConfig& config) {
  const auto [u, p] = continue_to(sys, start.u, start.p, p_tilde, config);
  auto c = measure(sys, u, p, config);
  if (!c) throw NumericalError(ErrorKind::CalibrationFailed, "singular Jacobian at the calibration point");
  c->draws = 1;
  return *c;
}

GenericCalibration calibrate(const ParametricSystem& sys, const PathPoint& start, const TrackerConfig& config) {
  if (config.p_end == start.p) throw NumericalError(ErrorKind::CalibrationFailed, "empty calibration interval");
  auto at_start = measure(sys, start.u, start.p, config);
  if (!at_start) throw NumericalError(ErrorKind::CalibrationFailed, "start point is singular");
  const double floor = config.calibration_floor * at_start->lambda_tilde;
  std::mt19937_64 rng(config.rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t draw = 1; draw <= config.calibration_draws; ++draw) {
    const double p_tilde = start.p + unit(rng) * (config.p_end - start.p);
    const auto [u, p] = continue_to(sys, start.u, start.p, p_tilde, config);
    auto c = measure(sys, u, p, config);
    if (c && c->lambda_tilde >= floor) {
      c->draws = draw;
      return *c;
    }
  }
  at_start->draws = config.calibration_draws;
  return *at_start;
}

Vector augmented_residual(const ParametricSystem& sys, const StepState& state0, const Vector& u, double p, double h) {
  const Vector F = sys.evaluate(u, p);
  if (state0.v.size() != u.size()) throw NumericalError(ErrorKind::DimensionMismatch, "eigenvector length");
  Vector r(F.size() + 1);
  r.head(F.size()) = F;
  r(F.size()) = state0.g * state0.v.dot(u - state0.point.u) * (1.0 - state0.s) + state0.s * (p - state0.point.p) - h;
  return r;
}

DenseMatrix augmented_jacobian(const ParametricSystem& sys, const StepState& state0, const Vector& u, double p) {
  const auto n = static_cast<Eigen::Index>(sys.dimension);
  if (state0.v.size() != n || u.size() != n) throw NumericalError(ErrorKind::DimensionMismatch, "augmented sizes");
  DenseMatrix A(n + 1, n + 1);
  A.topLeftCorner(n, n) = sys.jacobian_u(u, p);
  A.topRightCorner(n, 1) = sys.jacobian_p(u, p);
  A.bottomLeftCorner(1, n) = (state0.g * (1.0 - state0.s)) * state0.v.transpose();
  A(n, n) = state0.s;
  return A;
}

StepResult newton_step_augmented(const ParametricSystem& sys, const StepState& state0, double h,
                                 const TrackerConfig& config) {
  const auto n = static_cast<Eigen::Index>(sys.dimension);
  Vector z(n + 1);
  z << state0.point.u, state0.point.p;
  // Tangent predictor: the linearized augmented system with right-hand side (0, h).
  try {
    Vector rhs = Vector::Zero(n + 1);
    rhs(n) = h;
    z += LuSolver(augmented_jacobian(sys, state0, state0.point.u, state0.point.p)).solve(rhs);
  } catch (const NumericalError&) {
    z(n) += h * state0.s;
  }
  StepResult out;
  std::vector<double> history;
  for (;;) {
    const Vector r = augmented_residual(sys, state0, z.head(n), z(n), h);
    const double res = max_norm(r);
    out.u = z.head(n);
    out.p = z(n);
    if (res <= config.newton_tol) {
      out.status = StepStatus::Accepted;
      return out;
    }
    if (!std::isfinite(res)) {
      out.status = StepStatus::NeedsInflation;
      out.reason = "non-finite residual";
      return out;
    }
    history.push_back(res);
    if (history.size() > 3 && res > 0.5 * history[history.size() - 4]) {
      out.status = StepStatus::NeedsInflation;
      out.reason = "stalled";
      return out;
    }
    if (out.iterations >= config.newton_cap) {
      out.status = StepStatus::NeedsInflation;
      out.reason = "iteration cap";
      return out;
    }
    try {
      z -= LuSolver(augmented_jacobian(sys, state0, z.head(n), z(n))).solve(r);
    } catch (const NumericalError&) {
      out.status = StepStatus::NeedsInflation;
      out.reason = "singular augmented Jacobian";
      return out;
    }
    ++out.iterations;
  }
}

AdaptiveTracker::AdaptiveTracker(const ParametricSystem& sys, TrackerConfig config, GenericCalibration calibration)
    : sys_(sys), config_(std::move(config)), calibration_(std::move(calibration)) {
  config_.validate();
}

StepState AdaptiveTracker::state_at(const PathPoint& point) {
  StepState st;
  st.point = point;
  const DenseMatrix J = sys_.jacobian_u(point.u, point.p);
  const EigenPair eig = min_abs_real_eigenpair(J, config_.eigen);
  st.v = eig.vector;
  if (last_v_.size() == st.v.size()) align_sign(st.v, last_v_);
  st.s = std::min(1.0, std::abs(eig.value.real()) / calibration_.lambda_tilde);
  double sign = 1.0;
  try {
    const Vector w = LuSolver(J).solve(sys_.jacobian_p(point.u, point.p));
    const double proj = -st.v.dot(w);
    if (proj < 0) sign = -1.0;
  } catch (const NumericalError&) {
    sign = 1.0;
  }
  st.g = sign / calibration_.newton_dir_norm;
  last_v_ = st.v;
  return st;
}

std::optional<PathPoint> AdaptiveTracker::step(const StepState& state, double h) {
  ++attempts_;
  const auto n = static_cast<Eigen::Index>(sys_.dimension);
  StepResult r = newton_step_augmented(sys_, state, h, config_);
  Vector u = r.u;
  double p = r.p;
  if (r.status == StepStatus::NeedsInflation) {
    Vector z(n + 1);
    z << state.point.u, state.point.p + h * state.s;
    try {
      const auto res = inflated_newton(
          [&](const Vector& w) { return augmented_residual(sys_, state, w.head(n), w(n), h); },
          [&](const Vector& w) { return augmented_jacobian(sys_, state, w.head(n), w(n)); }, z, config_.newton_tol,
          config_);
      u = res.u.head(n);
      p = res.u(n);
      ++inflation_steps_;
    } catch (const NumericalError&) {
      return std::nullopt;
    }
  }
  try {
    return annotate_point(sys_, u, p, config_);
  } catch (const NumericalError&) {
    return std::nullopt;
  }
}

TrackResult AdaptiveTracker::track(const PathPoint& start, const TrackOptions& options) {
  TrackResult out;
  out.calibration = calibration_;
  out.points.push_back(start);
  out.points.back().index = 0;
  const std::size_t attempts_before = attempts_;
  const std::size_t inflation_before = inflation_steps_;
  auto finish = [&](TrackStop stop) {
    out.stop = stop;
    out.attempts = attempts_ - attempts_before;
    out.inflation_steps = inflation_steps_ - inflation_before;
    out.last_v = last_v_;
    return out;
  };
  const double p0 = start.p;
  const double h = config_.h;
  if ((config_.p_end - p0) * h <= 0.0) return finish(TrackStop::ReachedEnd);

  bool armed = options.armed;
  bool refining_crossing = false;
  std::size_t failures = 0;
  std::size_t crossing_halvings = 0;
  double h_local = h;
  const double threshold = zone_threshold();
  for (;;) {
    const PathPoint& cur = out.points.back();
    if (out.points.size() > 1 && (cur.p - p0) * (cur.p - config_.p_end) > 0.0) return finish(TrackStop::ReachedEnd);
    if (out.points.size() > config_.max_steps) return finish(TrackStop::MaxSteps);
    if (options.stop_when && out.points.size() > 1 && options.stop_when(cur)) return finish(TrackStop::Hook);
    const bool in_zone = std::abs(cur.lambda_min) < threshold;
    if (!armed && (!in_zone || (options.arm_distance > 0.0 &&
                                std::hypot(max_norm(cur.u - start.u), cur.p - start.p) > options.arm_distance))) {
      armed = true;
    }
    // The endgame needs |lambda| shrinking toward the singular point, not merely small.
    const bool approaching =
        out.points.size() < 2 || std::abs(cur.lambda_min) < std::abs(out.points[out.points.size() - 2].lambda_min);
    if (armed && in_zone && approaching && options.stop_in_pse_zone) return finish(TrackStop::PseZone);

    const StepState state = state_at(cur);
    auto next = step(state, h_local);
    if (!next) {
      if (++failures > 10) return finish(TrackStop::StepFailed);
      h_local /= 2.0;
      continue;
    }
    failures = 0;
    const bool crossed = cur.det_sign != 0 && next->det_sign != 0 && cur.det_sign != next->det_sign;
    if (crossed && armed && options.stop_in_pse_zone && options.refine_crossings) {
      if (crossing_halvings < 40) {
        ++crossing_halvings;
        refining_crossing = true;
        h_local /= 2.0;
        continue;
      }
      next->index = out.points.size();
      out.points.push_back(*next);
      return finish(TrackStop::Crossing);
    }
    next->index = out.points.size();
    out.points.push_back(*next);
    if (!refining_crossing) h_local = h;
  }
}

TrackResult track(const ParametricSystem& sys, const PathPoint& start, const TrackerConfig& config,
                  const TrackOptions& options) {
  AdaptiveTracker tracker(sys, config, calibrate(sys, start, config));
  return tracker.track(start, options);
}

}  // namespace homotrack
