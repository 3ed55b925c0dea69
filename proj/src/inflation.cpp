#include "homotrack/inflation.hpp"

#include <Eigen/QR>

namespace homotrack {

InflatedSystem assemble_inflated(const DenseMatrix& J, const Vector& F) {
  if (J.rows() != J.cols() || J.rows() != F.size()) {
    throw NumericalError(ErrorKind::DimensionMismatch, "inflation expects square J matching F");
  }
  const Eigen::Index n = J.rows();
  MinNormEigen eig;
  try {
    eig = min_gram_eigenpair(J);
  } catch (const NumericalError& e) {
    throw NumericalError(ErrorKind::EigenFailure, e.what());
  }
  const DenseMatrix G = J.transpose() * J;
  const Vector Gv = G * eig.vector;
  InflatedSystem sys;
  sys.v = eig.vector;
  // v^T G v instead of the reported eigenvalue keeps (v, -1) an exact kernel vector.
  sys.lambda_min = eig.vector.dot(Gv);
  sys.matrix.resize(n + 1, n + 1);
  sys.matrix.topLeftCorner(n, n) = G;
  sys.matrix.topRightCorner(n, 1) = Gv;
  sys.matrix.bottomLeftCorner(1, n) = Gv.transpose();
  sys.matrix(n, n) = sys.lambda_min;
  const Vector JtF = J.transpose() * F;
  sys.rhs.resize(n + 1);
  sys.rhs.head(n) = -JtF;
  sys.rhs(n) = -eig.vector.dot(JtF);
  return sys;
}

InflationUpdate split_inflated(const InflatedSystem& sys, const Vector& raw) {
  const Eigen::Index n = sys.v.size();
  if (raw.size() != n + 1) throw NumericalError(ErrorKind::DimensionMismatch, "raw inflated solution length");
  InflationUpdate up;
  up.delta_u_tilde = raw.head(n);
  up.alpha = raw(n);
  up.delta_u = up.delta_u_tilde + up.alpha * sys.v;
  return up;
}

InflationUpdate solve_inflated(const InflatedSystem& sys, double tol, std::size_t cap) {
  const Eigen::Index m = sys.rhs.size();
  const double rhs_norm = sys.rhs.norm();
  if (rhs_norm == 0.0) return split_inflated(sys, Vector::Zero(m));
  try {
    const auto result = gauss_seidel(sys.matrix, sys.rhs, Vector::Zero(m), tol * rhs_norm, cap);
    auto up = split_inflated(sys, result.solution);
    up.iterations = result.iterations;
    return up;
  } catch (const IterationCapExceeded&) {
    // Any solution works since Delta u is invariant along the kernel (v, -1).
    Eigen::CompleteOrthogonalDecomposition<DenseMatrix> cod(sys.matrix);
    auto up = split_inflated(sys, cod.solve(sys.rhs));
    up.iterations = cap;
    up.used_fallback = true;
    return up;
  }
}

InflatedNewtonResult inflated_newton(const std::function<Vector(const Vector&)>& residual,
                                     const std::function<DenseMatrix(const Vector&)>& jacobian, const Vector& z0,
                                     double tol, const TrackerConfig& config) {
  InflatedNewtonResult out;
  out.u = z0;
  Vector F = residual(z0);
  out.residual = max_norm(F);
  Vector best = z0;
  double best_res = out.residual;
  while (!(out.residual <= tol)) {
    if (out.iterations >= config.inflation_newton_cap || !std::isfinite(out.residual)) {
      throw ConvergenceFailure("inflated Newton did not reach tolerance", best, best_res);
    }
    const auto system = assemble_inflated(jacobian(out.u), F);
    const auto step = solve_inflated(system, config.inflation_tol, config.inflation_cap);
    out.u += step.delta_u;
    ++out.iterations;
    F = residual(out.u);
    out.residual = max_norm(F);
    if (out.residual < best_res) {
      best_res = out.residual;
      best = out.u;
    }
  }
  return out;
}

InflatedNewtonResult inflated_newton(const ParametricSystem& sys, const Vector& u, double p,
                                     const TrackerConfig& config) {
  return inflated_newton([&](const Vector& z) { return sys.evaluate(z, p); },
                         [&](const Vector& z) { return sys.jacobian_u(z, p); }, u, config.newton_tol, config);
}

}  // namespace homotrack
