#include "homotrack/baseline_tracker.hpp"

#include <cmath>

#include "homotrack/adaptive_tracker.hpp"

namespace homotrack {

const char* to_string(BaselineStop stop) noexcept {
  switch (stop) {
    case BaselineStop::ReachedEnd: return "reached_end";
    case BaselineStop::Stagnated: return "stagnated";
    case BaselineStop::MaxSteps: return "max_steps";
  }
  return "unknown";
}

Vector euler_predict(const ParametricSystem& sys, const Vector& u0, double p0, double dp) {
  if (dp == 0.0) return u0;
  return u0 - LuSolver(sys.jacobian_u(u0, p0)).solve(Vector(sys.jacobian_p(u0, p0) * dp));
}

CorrectResult newton_correct(const ParametricSystem& sys, const Vector& u_pred, double p, double tol,
                             std::size_t cap) {
  CorrectResult out;
  out.u = u_pred;
  Vector F = sys.evaluate(out.u, p);
  out.residual = max_norm(F);
  while (!(out.residual <= tol)) {
    if (out.iterations >= cap || !std::isfinite(out.residual)) {
      throw ConvergenceFailure("corrector did not converge", out.u, out.residual);
    }
    out.u -= LuSolver(sys.jacobian_u(out.u, p)).solve(F);
    ++out.iterations;
    F = sys.evaluate(out.u, p);
    const double next = max_norm(F);
    if (!(next < out.residual) && !(next <= tol)) {
      throw ConvergenceFailure("corrector residual increased", out.u, next);
    }
    out.residual = next;
  }
  return out;
}

BaselineResult track_trial_and_error(const ParametricSystem& sys, const PathPoint& start, const TrackerConfig& config,
                                     const BaselineOptions& options) {
  config.validate();
  BaselineResult out;
  out.points.push_back(start);
  out.points.back().index = 0;
  out.attempts_at.push_back(0);
  const double h0 = config.h;
  const double p0 = start.p;
  if ((config.p_end - p0) * h0 <= 0.0) return out;

  double h = h0;
  std::size_t successes = 0;
  bool localizing = false;  // a sign change of det F_u is being bracketed
  bool jumping = false;     // next accepted step may cross the localized point
  for (;;) {
    const PathPoint cur = out.points.back();
    if (out.points.size() > 1 && (cur.p - p0) * (cur.p - config.p_end) > 0.0) {
      out.stop = BaselineStop::ReachedEnd;
      return out;
    }
    if (out.attempts >= config.max_steps) {
      out.stop = BaselineStop::MaxSteps;
      return out;
    }
    if (std::abs(h) < config.min_h) {
      if (!localizing) {
        out.stop = BaselineStop::Stagnated;
        out.final_h = h;
        out.stagnation = cur;
        return out;
      }
      out.crossings.push_back(cur);
      out.crossing_attempts.push_back(out.attempts);
      localizing = false;
      jumping = true;
      h = h0;
      successes = 0;
    }
    ++out.attempts;
    out.step_sizes.push_back(std::abs(h));
    const double p_next = cur.p + h;
    std::optional<PathPoint> next;
    try {
      Vector pred;
      try {
        pred = euler_predict(sys, cur.u, cur.p, h);
      } catch (const NumericalError&) {
        pred = cur.u;
        ++out.zeroth_order_predictions;
      }
      const auto corr = newton_correct(sys, pred, p_next, config.newton_tol, config.corrector_cap);
      // A corrector that lands far from its predictor has jumped to another branch.
      if (max_norm(corr.u - pred) > std::sqrt(std::abs(h)) * std::max(1.0, max_norm(pred))) {
        throw ConvergenceFailure("corrector left the predictor neighbourhood", corr.u, corr.residual);
      }
      next = annotate_point(sys, corr.u, p_next, config, out.points.size());
    } catch (const NumericalError&) {
      next.reset();
    }
    const bool crossed = next && cur.det_sign != 0 && next->det_sign != 0 && cur.det_sign != next->det_sign;
    if (!next || (crossed && options.detect_crossings && !jumping)) {
      if (crossed) localizing = true;
      h /= 2.0;
      successes = 0;
      continue;
    }
    jumping = false;
    out.points.push_back(*next);
    out.attempts_at.push_back(out.attempts);
    if (++successes >= config.grow_after) {
      h = std::copysign(std::min(2.0 * std::abs(h), std::abs(h0)), h0);
      successes = 0;
    }
  }
}

}  // namespace homotrack
