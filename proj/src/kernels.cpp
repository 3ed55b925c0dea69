#include "homotrack/kernels.hpp"

#include <algorithm>
#include <cmath>

#ifdef HOMOTRACK_HAVE_OPENMP
#include <omp.h>
#endif

namespace homotrack::kernels {

bool parallel_available() noexcept {
#ifdef HOMOTRACK_HAVE_OPENMP
  return true;
#else
  return false;
#endif
}

namespace {

void fd_column(const ResidualFn& f, const Vector& u, double p, double scale, Eigen::Index j, DenseMatrix& J) {
  const double step = scale * std::max(1.0, std::abs(u(j)));
  Vector up = u;
  Vector um = u;
  up(j) += step;
  um(j) -= step;
  J.col(j) = (f(up, p) - f(um, p)) / (up(j) - um(j));
}

NewtonRun newton_from(const ResidualFn& f, const JacobianFn& jac, const Vector& guess, double p, double tol,
                      std::size_t cap) {
  NewtonRun run;
  Vector u = guess;
  Vector r = f(u, p);
  double res = max_norm(r);
  while (run.iterations < cap && std::isfinite(res) && res > tol) {
    try {
      u -= LuSolver(jac(u, p)).solve(r);
    } catch (const NumericalError&) {
      break;
    }
    ++run.iterations;
    r = f(u, p);
    res = max_norm(r);
  }
  run.residual = res;
  if (std::isfinite(res) && res <= tol) run.solution = u;
  return run;
}

}  // namespace

DenseMatrix fd_jacobian(const ResidualFn& f, const Vector& u, double p, double scale, Exec exec) {
  const Eigen::Index n = u.size();
  const Eigen::Index m = f(u, p).size();
  DenseMatrix J(m, n);
  if (exec == Exec::Parallel) {
#ifdef HOMOTRACK_HAVE_OPENMP
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < n; ++j) fd_column(f, u, p, scale, j, J);
    return J;
#endif
  }
  for (Eigen::Index j = 0; j < n; ++j) fd_column(f, u, p, scale, j, J);
  return J;
}

std::vector<NewtonRun> multistart_newton(const ResidualFn& f, const JacobianFn& jac,
                                         const std::vector<Vector>& guesses, double p, double tol,
                                         std::size_t cap, Exec exec) {
  std::vector<NewtonRun> runs(guesses.size());
  const auto count = static_cast<std::ptrdiff_t>(guesses.size());
  if (exec == Exec::Parallel) {
#ifdef HOMOTRACK_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      runs[static_cast<std::size_t>(i)] = newton_from(f, jac, guesses[static_cast<std::size_t>(i)], p, tol, cap);
    }
    return runs;
#endif
  }
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    runs[static_cast<std::size_t>(i)] = newton_from(f, jac, guesses[static_cast<std::size_t>(i)], p, tol, cap);
  }
  return runs;
}

std::vector<Vector> batch_evaluate(const ResidualFn& f, const std::vector<Vector>& us, const std::vector<double>& ps,
                                   Exec exec) {
  if (us.size() != ps.size()) throw NumericalError(ErrorKind::DimensionMismatch, "batch sizes differ");
  std::vector<Vector> out(us.size());
  const auto count = static_cast<std::ptrdiff_t>(us.size());
  if (exec == Exec::Parallel) {
#ifdef HOMOTRACK_HAVE_OPENMP
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      const auto k = static_cast<std::size_t>(i);
      out[k] = f(us[k], ps[k]);
    }
    return out;
#endif
  }
  for (std::size_t k = 0; k < us.size(); ++k) out[k] = f(us[k], ps[k]);
  return out;
}

}  // namespace homotrack::kernels
