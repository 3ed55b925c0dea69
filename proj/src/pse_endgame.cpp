#include "homotrack/pse_endgame.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/SVD>

namespace homotrack {

const char* to_string(BifurcationKind kind) noexcept {
  switch (kind) {
    case BifurcationKind::BranchPoint: return "branch_point";
    case BifurcationKind::Fold: return "fold";
    case BifurcationKind::Unclassified: return "unclassified";
  }
  return "unknown";
}

Vector PuiseuxModel::evaluate(double lambda) const {
  Vector y = constant;
  for (int j = 1; j <= terms; ++j) {
    y += std::pow(lambda, static_cast<double>(j) / c) * coefficients.row(j - 1).transpose();
  }
  return y;
}

double estimate_leading_exponent(double y0, double y1, double y2, double k1, double k2) {
  if (!(k1 > 0 && k1 < 1 && k2 > 0 && k2 < 1) || k1 == k2) {
    throw NumericalError(ErrorKind::InvalidConfig, "k1, k2 must be distinct values in (0, 1)");
  }
  if (y0 == y2) throw NumericalError(ErrorKind::NoRoot, "y0 == y2");
  const double m = (y0 - y1) / (y0 - y2);
  // ratio(x) = (1 - k1^x) / (1 - k2^x) is monotone on (0, inf); f(x) = 0 <=> ratio(x) = m.
  auto f = [&](double x) { return 1.0 - std::pow(k1, x) - m * (1.0 - std::pow(k2, x)); };
  double lo = 1e-9;
  double hi = 10.0;
  double flo = f(lo);
  const double fhi = f(hi);
  if (!std::isfinite(m) || flo * fhi > 0.0) throw NumericalError(ErrorKind::NoRoot, "m outside attainable range");
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

PuiseuxModel fit_puiseux(const std::vector<double>& lambdas, const DenseMatrix& values, int c, int terms) {
  const auto S = static_cast<Eigen::Index>(lambdas.size());
  if (c < 1 || terms < 1) throw NumericalError(ErrorKind::InvalidConfig, "winding and terms must be positive");
  if (values.rows() != S) throw NumericalError(ErrorKind::DimensionMismatch, "one value row per sample");
  if (S < terms + 1) throw NumericalError(ErrorKind::IllConditionedFit, "fewer samples than unknowns");
  DenseMatrix Phi(S, terms + 1);
  for (Eigen::Index i = 0; i < S; ++i) {
    if (!(lambdas[static_cast<std::size_t>(i)] > 0)) {
      throw NumericalError(ErrorKind::IllConditionedFit, "lambda samples must be positive");
    }
    Phi(i, 0) = 1.0;
    for (int j = 1; j <= terms; ++j) Phi(i, j) = std::pow(lambdas[static_cast<std::size_t>(i)], double(j) / c);
  }
  const Vector scale = Phi.colwise().norm().transpose();
  const DenseMatrix scaled = Phi * scale.cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<DenseMatrix> svd(scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > 0) || sv(0) / sv(sv.size() - 1) > 1e12) {
    throw NumericalError(ErrorKind::IllConditionedFit, "design condition above 1e12");
  }
  const DenseMatrix X = scale.cwiseInverse().asDiagonal() * svd.solve(values);
  PuiseuxModel model;
  model.c = c;
  model.terms = terms;
  model.constant = X.row(0).transpose();
  model.coefficients = X.bottomRows(terms);
  model.residual = (Phi * X - values).cwiseAbs().maxCoeff();
  return model;
}

int default_terms(std::size_t samples) { return std::clamp(static_cast<int>(samples) - 2, 1, 6); }

WindingChoice select_winding(const std::vector<double>& lambdas, const DenseMatrix& values, int max_c, int terms) {
  const std::size_t S = lambdas.size();
  if (S < static_cast<std::size_t>(terms) + 2) {
    throw NumericalError(ErrorKind::IllConditionedFit, "need at least terms + 2 samples");
  }
  const std::size_t held = static_cast<std::size_t>(
      std::min_element(lambdas.begin(), lambdas.end()) - lambdas.begin());
  std::vector<double> fit_l;
  DenseMatrix fit_y(static_cast<Eigen::Index>(S - 1), values.cols());
  for (std::size_t i = 0, r = 0; i < S; ++i) {
    if (i == held) continue;
    fit_l.push_back(lambdas[i]);
    fit_y.row(static_cast<Eigen::Index>(r++)) = values.row(static_cast<Eigen::Index>(i));
  }
  const Vector actual = values.row(static_cast<Eigen::Index>(held)).transpose();
  const double data_scale = 1.0 + values.cwiseAbs().maxCoeff();
  WindingChoice choice;
  choice.holdout_error = std::numeric_limits<double>::infinity();
  choice.c = 0;
  for (int c = 1; c <= max_c; ++c) {
    double err = std::numeric_limits<double>::infinity();
    try {
      const PuiseuxModel m = fit_puiseux(fit_l, fit_y, c, terms);
      err = max_norm(m.evaluate(lambdas[held]) - actual);
    } catch (const NumericalError&) {
    }
    choice.errors.push_back(err);
    const double tie = 1e-9 * (std::isfinite(choice.holdout_error) ? choice.holdout_error : 0.0) + 1e-12 * data_scale;
    if (std::isfinite(err) && (choice.c == 0 || err < choice.holdout_error - tie)) {
      choice.c = c;
      choice.holdout_error = err;
    }
  }
  if (choice.c == 0) throw NumericalError(ErrorKind::AllCandidatesFailed, "no winding number produced a fit");
  choice.model = fit_puiseux(lambdas, values, choice.c, terms);
  return choice;
}

double pchip(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  const std::size_t n = xs.size();
  if (n != ys.size() || n < 2) throw NumericalError(ErrorKind::DimensionMismatch, "pchip needs matching data");
  std::vector<double> hk(n - 1), dk(n - 1), m(n);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    hk[k] = xs[k + 1] - xs[k];
    dk[k] = (ys[k + 1] - ys[k]) / hk[k];
  }
  if (n == 2) {
    m[0] = m[1] = dk[0];
  } else {
    for (std::size_t k = 1; k + 1 < n; ++k) {
      if (dk[k - 1] * dk[k] <= 0) {
        m[k] = 0.0;
      } else {
        const double w1 = 2 * hk[k] + hk[k - 1];
        const double w2 = hk[k] + 2 * hk[k - 1];
        m[k] = (w1 + w2) / (w1 / dk[k - 1] + w2 / dk[k]);
      }
    }
    auto end_slope = [](double h0, double h1, double d0, double d1) {
      double s = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
      if (s * d0 <= 0) return 0.0;
      if (d0 * d1 <= 0 && std::abs(s) > std::abs(3 * d0)) return 3 * d0;
      return s;
    };
    m[0] = end_slope(hk[0], hk[1], dk[0], dk[1]);
    m[n - 1] = end_slope(hk[n - 2], hk[n - 3], dk[n - 2], dk[n - 3]);
  }
  std::size_t k = 0;
  while (k + 2 < n && x > xs[k + 1]) ++k;
  const double t = (x - xs[k]) / hk[k];
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * ys[k] + (t3 - 2 * t2 + t) * hk[k] * m[k] + (-2 * t3 + 3 * t2) * ys[k + 1] +
         (t3 - t2) * hk[k] * m[k + 1];
}

std::optional<double> exponent_from_samples(const std::vector<double>& lambdas, const std::vector<double>& ys,
                                            double k1, double k2) {
  std::vector<std::size_t> order(lambdas.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return lambdas[a] < lambdas[b]; });
  std::vector<double> xs, vs;
  for (auto i : order) {
    if (!xs.empty() && lambdas[i] <= xs.back()) continue;
    xs.push_back(lambdas[i]);
    vs.push_back(ys[i]);
  }
  if (xs.size() < 3) return std::nullopt;
  const double kmin = std::min(k1, k2);
  const double la = xs.front() / kmin;
  if (la > xs.back() * (1 + 1e-12)) return std::nullopt;
  const double at = std::min(la, xs.back());
  try {
    return estimate_leading_exponent(pchip(xs, vs, at), pchip(xs, vs, k1 * at), pchip(xs, vs, k2 * at), k1, k2);
  } catch (const NumericalError&) {
    return std::nullopt;
  }
}

BifurcationRecord extrapolate(const ParametricSystem& sys, const std::vector<EndgameSample>& samples,
                              const TrackerConfig& config) {
  if (samples.size() < 3) throw NumericalError(ErrorKind::IllConditionedFit, "endgame needs at least 3 samples");
  const auto n = static_cast<Eigen::Index>(samples.front().u.size());
  const auto S = static_cast<Eigen::Index>(samples.size());
  std::vector<double> lambdas;
  DenseMatrix U(S, n);
  DenseMatrix P(S, 1);
  for (Eigen::Index i = 0; i < S; ++i) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    lambdas.push_back(s.lambda);
    U.row(i) = s.u.transpose();
    P(i, 0) = s.p;
  }
  const int terms = default_terms(samples.size());
  const WindingChoice cu = select_winding(lambdas, U, config.winding_max, terms);
  const WindingChoice cp = select_winding(lambdas, P, config.winding_max, terms);
  BifurcationRecord rec;
  rec.u_b = cu.model.constant;
  rec.p_b = cp.model.constant(0);
  rec.c1 = cu.c;
  rec.c2 = cp.c;
  rec.holdout_error = std::max(cu.holdout_error, cp.holdout_error);
  rec.samples_used = samples.size();
  rec.residual = sys.residual_norm(rec.u_b, rec.p_b);

  std::mt19937_64 rng(config.rng_seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal;
  Vector alpha(n);
  for (Eigen::Index i = 0; i < n; ++i) alpha(i) = normal(rng);
  alpha.normalize();
  std::vector<double> yu, yp;
  for (const auto& s : samples) {
    yu.push_back(alpha.dot(s.u));
    yp.push_back(s.p);
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  rec.exponent_u = exponent_from_samples(lambdas, yu, config.k1, config.k2).value_or(nan);
  rec.exponent_p = exponent_from_samples(lambdas, yp, config.k1, config.k2).value_or(nan);
  return rec;
}

std::vector<PathPoint> endgame_window(const std::vector<PathPoint>& path, std::size_t count) {
  std::vector<PathPoint> window;
  for (auto it = path.rbegin(); it != path.rend() && window.size() < count; ++it) {
    if (!window.empty() && !(std::abs(it->lambda_min) > std::abs(window.back().lambda_min))) break;
    window.push_back(*it);
  }
  std::reverse(window.begin(), window.end());
  return window;
}

namespace {

std::vector<EndgameSample> to_samples(const std::vector<PathPoint>& pts) {
  std::vector<EndgameSample> out;
  for (const auto& p : pts) out.push_back({std::abs(p.lambda_min), p.u, p.p});
  return out;
}

double distance(const BifurcationRecord& a, const BifurcationRecord& b) {
  return std::max(max_norm(a.u_b - b.u_b), std::abs(a.p_b - b.p_b));
}

// Steps from the last sample toward |lambda| = |lambda_N| / 2, bisecting the
// augmented step length until the new |lambda| is within 25% of the target and
// det F_u keeps its sign.
std::optional<PathPoint> sample_half(AdaptiveTracker& tracker, const std::vector<PathPoint>& samples) {
  const PathPoint& last = samples.back();
  const double lam_last = std::abs(last.lambda_min);
  const double target = 0.5 * lam_last;
  const double h = tracker.config().h;
  const StepState state = tracker.state_at(last);

  double trial = 0.5 * h;
  if (samples.size() >= 2) {
    const PathPoint& prev = samples[samples.size() - 2];
    const double moved = std::abs(state.g * state.v.dot(last.u - prev.u) * (1.0 - state.s) +
                                  state.s * (last.p - prev.p));
    const double drop = std::abs(prev.lambda_min) - lam_last;
    if (moved > 0 && drop > 0) trial = std::copysign(std::clamp(moved * target / drop, 1e-12 * std::abs(h),
                                                                std::abs(h)), h);
  }
  double lo = 0.0;
  double hi = 0.0;
  std::optional<PathPoint> best;
  double best_gap = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt < 30; ++attempt) {
    auto pt = tracker.step(state, trial);
    bool too_far = true;
    if (pt) {
      const double lam = std::abs(pt->lambda_min);
      const bool flipped = last.det_sign != 0 && pt->det_sign != 0 && pt->det_sign != last.det_sign;
      if (!flipped && lam < lam_last) {
        const double gap = std::abs(std::log(lam / target));
        if (gap < best_gap) {
          best_gap = gap;
          best = pt;
        }
        if (lam >= 0.75 * target && lam <= 1.25 * target) return pt;
        too_far = lam < 0.75 * target;
      }
    }
    if (too_far) {
      hi = trial;
    } else {
      lo = trial;
    }
    trial = hi == 0.0 ? 2.0 * trial : 0.5 * (lo + hi);
    if (std::abs(trial) < 1e-14 * std::abs(h)) break;
  }
  if (best && best_gap < std::log(4.0)) return best;
  return std::nullopt;
}

}  // namespace

BifurcationRecord refine_bifurcation(AdaptiveTracker& tracker, const std::vector<PathPoint>& window) {
  const TrackerConfig& config = tracker.config();
  std::vector<PathPoint> samples = window;
  std::optional<BifurcationRecord> prev;
  std::vector<PathPoint> added;
  // Top up short windows before the first fit.
  while (samples.size() < 3) {
    auto next = sample_half(tracker, samples);
    if (!next) throw NumericalError(ErrorKind::NoConvergence, "could not generate endgame samples");
    samples.push_back(*next);
    added.push_back(*next);
  }
  BifurcationRecord rec;
  for (std::size_t round = 0; round < config.pse_rounds; ++round) {
    try {
      rec = extrapolate(tracker.system(), to_samples(samples), config);
    } catch (const NumericalError&) {
      if (!prev) throw;
      rec = *prev;
      break;
    }
    rec.rounds = round + 1;
    if (prev) {
      const double scale = std::max(1.0, std::max(max_norm(rec.u_b), std::abs(rec.p_b)));
      if (distance(rec, *prev) <= config.pse_tol * scale) {
        rec.converged = true;
        break;
      }
    }
    prev = rec;
    auto next = sample_half(tracker, samples);
    if (!next) break;
    samples.push_back(*next);
    added.push_back(*next);
    if (samples.size() > config.pse_samples) samples.erase(samples.begin());
  }
  rec.new_samples = added;
  return rec;
}

}  // namespace homotrack
