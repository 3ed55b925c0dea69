#include "homotrack/tangent_cone.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/SVD>

#include "homotrack/adaptive_tracker.hpp"
#include "homotrack/inflation.hpp"

namespace homotrack {

const char* to_string(ConeKind kind) noexcept {
  switch (kind) {
    case ConeKind::TwoLines: return "two_lines";
    case ConeKind::OneLine: return "one_line";
    case ConeKind::Complex: return "complex";
    case ConeKind::Degenerate: return "degenerate";
  }
  return "unknown";
}

Vector TangentDirection::stacked() const {
  Vector z(delta_u.size() + 1);
  z << delta_u, delta_p;
  return z;
}

double angle_deg(const Vector& a, const Vector& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (!(na > 0) || !(nb > 0)) return 180.0;
  const double c = std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

TangentFrame build_frame(const ParametricSystem& sys, const Vector& u_b, double p_b, const FrameOptions& options) {
  TangentFrame f;
  f.A = sys.jacobian_full(u_b, p_b);
  const Eigen::Index n = f.A.rows();
  DenseMatrix U, V;
  if (n > 64) {
    Eigen::BDCSVD<DenseMatrix> svd(f.A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    f.singular_values = svd.singularValues();
    U = svd.matrixU();
    V = svd.matrixV();
  } else {
    Eigen::JacobiSVD<DenseMatrix> svd(f.A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    f.singular_values = svd.singularValues();
    U = svd.matrixU();
    V = svd.matrixV();
  }
  const Vector& s = f.singular_values;
  bool collapsed = false;
  if (n == 1) {
    collapsed = s(0) <= options.scalar_cutoff;
  } else {
    collapsed = s(n - 1) <= options.rank_gap * s(n - 2);
    const bool second = n == 2 ? s(0) <= options.scalar_cutoff : s(n - 2) <= options.rank_gap * s(n - 3);
    if (collapsed && second) throw NumericalError(ErrorKind::UnsupportedCorank, "null space of [F_u, F_p] exceeds 2");
  }
  const Vector extra = V.col(n);
  if (!collapsed) {
    f.null_dim = 1;
    f.Q1 = extra.head(n);
    f.q1 = extra(n);
    f.Q2 = Vector::Zero(n);
    f.q2 = 0.0;
    f.Lambda = Vector::Zero(n);
    return f;
  }
  const Vector first = V.col(n - 1);
  f.null_dim = 2;
  f.Q1 = first.head(n);
  f.q1 = first(n);
  f.Q2 = extra.head(n);
  f.q2 = extra(n);
  f.Lambda = U.col(n - 1);
  return f;
}

QuadraticModel quadratic_model(const ParametricSystem& sys, const TangentFrame& frame, const Vector& u_b, double p_b,
                               double step) {
  QuadraticModel qm;
  const double d = step > 0 ? step : 1e-4 * std::max(1.0, u_b.norm());
  qm.step = d;
  auto g = [&](double a1, double a2) {
    const Vector u = u_b + a1 * frame.Q1 + a2 * frame.Q2;
    const double p = p_b + a1 * frame.q1 + a2 * frame.q2;
    return frame.Lambda.dot(sys.evaluate(u, p));
  };
  const double g00 = g(0, 0);
  const double gp0 = g(d, 0), gm0 = g(-d, 0), g0p = g(0, d), g0m = g(0, -d);
  const double gpp = g(d, d), gpm = g(d, -d), gmp = g(-d, d), gmm = g(-d, -d);
  qm.g0 = g00;
  qm.gradient << (gp0 - gm0) / (2 * d), (g0p - g0m) / (2 * d);
  qm.H(0, 0) = (gp0 - 2 * g00 + gm0) / (d * d);
  qm.H(1, 1) = (g0p - 2 * g00 + g0m) / (d * d);
  qm.H(0, 1) = qm.H(1, 0) = (gpp - gpm - gmp + gmm) / (4 * d * d);
  return qm;
}

namespace {

TangentDirection make_direction(const Eigen::Vector2d& a, const TangentFrame& frame) {
  TangentDirection t;
  Vector du = a(0) * frame.Q1 + a(1) * frame.Q2;
  double dp = a(0) * frame.q1 + a(1) * frame.q2;
  const double norm = std::sqrt(du.squaredNorm() + dp * dp);
  t.a = a / norm;
  t.delta_u = du / norm;
  t.delta_p = dp / norm;
  // Orientation: positive parameter component, else largest state component positive.
  double key = t.delta_p;
  if (std::abs(key) < 1e-12 && t.delta_u.size() > 0) {
    Eigen::Index i = 0;
    t.delta_u.cwiseAbs().maxCoeff(&i);
    key = t.delta_u(i);
  }
  if (key < 0) {
    t.a = -t.a;
    t.delta_u = -t.delta_u;
    t.delta_p = -t.delta_p;
  }
  return t;
}

TangentDirection negated(TangentDirection t) {
  t.a = -t.a;
  t.delta_u = -t.delta_u;
  t.delta_p = -t.delta_p;
  return t;
}

}  // namespace

ConeResult cone_directions(const Eigen::Matrix2d& H, const TangentFrame& frame) {
  ConeResult out;
  const double scale = H.norm();
  if (!(scale > 0)) {
    out.kind = ConeKind::Degenerate;
    return out;
  }
  const double h11 = H(0, 0), h12 = 0.5 * (H(0, 1) + H(1, 0)), h22 = H(1, 1);
  const double disc = h12 * h12 - h11 * h22;
  std::vector<Eigen::Vector2d> lines;
  if (disc < -1e-10 * scale * scale) {
    out.kind = ConeKind::Complex;
    return out;
  }
  if (disc <= 1e-10 * scale * scale) {
    out.kind = ConeKind::OneLine;
    lines.push_back(std::abs(h11) >= std::abs(h22) ? Eigen::Vector2d(-h12, h11) : Eigen::Vector2d(h22, -h12));
  } else {
    out.kind = ConeKind::TwoLines;
    const double r = std::sqrt(disc);
    if (std::abs(h11) >= std::abs(h22)) {
      lines.emplace_back(-h12 + r, h11);
      lines.emplace_back(-h12 - r, h11);
    } else {
      lines.emplace_back(h22, -h12 + r);
      lines.emplace_back(h22, -h12 - r);
    }
  }
  for (const auto& a : lines) {
    const TangentDirection t = make_direction(a, frame);
    out.directions.push_back(t);
    out.directions.push_back(negated(t));
  }
  return out;
}

std::vector<BranchSeed> seed_branches(const ParametricSystem& sys, const BifurcationRecord& record,
                                      const std::vector<TangentDirection>& directions, const SeedOptions& options,
                                      const TrackerConfig& config) {
  std::vector<BranchSeed> seeds;
  if (options.h_branch == 0.0) return seeds;
  const auto n = static_cast<Eigen::Index>(sys.dimension);
  Vector zb(n + 1);
  zb << record.u_b, record.p_b;
  bool any_tried = false;
  for (const auto& dir : directions) {
    const Vector d = dir.stacked();
    if (options.back_secant.size() == d.size() && angle_deg(d, options.back_secant) < options.back_angle_deg) continue;
    any_tried = true;
    const double h = options.h_branch;
    auto residual = [&](const Vector& z) {
      Vector r(n + 1);
      r.head(n) = sys.evaluate(z.head(n), z(n));
      r(n) = d.dot(z - zb) - h;
      return r;
    };
    auto jacobian = [&](const Vector& z) {
      DenseMatrix J(n + 1, n + 1);
      J.topRows(n) = sys.jacobian_full(z.head(n), z(n));
      J.row(n) = d.transpose();
      return J;
    };
    Vector z = zb + h * d;
    bool ok = false;
    try {
      for (std::size_t it = 0; it < config.newton_cap; ++it) {
        const Vector r = residual(z);
        if (max_norm(r) <= config.newton_tol) {
          ok = true;
          break;
        }
        z -= LuSolver(jacobian(z)).solve(r);
      }
      ok = ok || max_norm(residual(z)) <= config.newton_tol;
    } catch (const NumericalError&) {
      ok = false;
    }
    if (!ok) {
      try {
        z = inflated_newton(residual, jacobian, zb + h * d, config.newton_tol, config).u;
        ok = true;
      } catch (const NumericalError&) {
        ok = false;
      }
    }
    if (!ok) continue;
    // The corrected point must stay near the predicted ray.
    if (angle_deg(z - zb, d) > 45.0) continue;
    const bool duplicate = std::any_of(seeds.begin(), seeds.end(), [&](const BranchSeed& s) {
      Vector other(n + 1);
      other << s.point.u, s.point.p;
      return max_norm(other - z) <= 1e-6 * std::max(1.0, std::abs(h));
    });
    if (duplicate) continue;
    try {
      seeds.push_back({annotate_point(sys, z.head(n), z(n), config), dir});
    } catch (const NumericalError&) {
    }
  }
  if (seeds.empty() && any_tried) throw NumericalError(ErrorKind::NoBranchFound, "no tangent direction corrected");
  return seeds;
}

}  // namespace homotrack
