#include "homotrack/pde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace homotrack {

Grid1D make_grid(std::size_t N) {
  if (N < 3) throw NumericalError(ErrorKind::InvalidGrid, "need at least 3 grid points");
  Grid1D grid;
  grid.N = N;
  grid.h = 1.0 / static_cast<double>(N - 1);
  grid.nodes = Vector::LinSpaced(static_cast<Eigen::Index>(N), 0.0, 1.0);
  return grid;
}

ParametricSystem build_pde1d(std::size_t N) {
  const Grid1D grid = make_grid(N);
  const auto n = static_cast<Eigen::Index>(N - 1);
  const double inv_h2 = 1.0 / (grid.h * grid.h);

  ParametricSystem sys;
  sys.name = "pde1d";
  sys.dimension = static_cast<std::size_t>(n);
  sys.evaluator = [n, inv_h2](const Vector& u, double p) {
    Vector F(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double left = i == 0 ? u(1) : u(i - 1);  // ghost node mirrors u_1
      const double right = i + 1 < n ? u(i + 1) : 0.0;
      const double ui = u(i);
      F(i) = (right - 2.0 * ui + left) * inv_h2 - ui * ui * (ui * ui - p);
    }
    return F;
  };
  sys.analytic_jacobian_u = [n, inv_h2](const Vector& u, double p) {
    DenseMatrix J = DenseMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double ui = u(i);
      J(i, i) = -2.0 * inv_h2 - (4.0 * ui * ui * ui - 2.0 * p * ui);
      if (i + 1 < n) J(i, i + 1) += inv_h2;
      if (i == 0) {
        J(0, 1) += inv_h2;
      } else {
        J(i, i - 1) += inv_h2;
      }
    }
    return J;
  };
  sys.analytic_jacobian_p = [](const Vector& u, double) -> Vector { return u.array().square(); };
  return sys;
}

std::vector<Vector> pde1d_guess_family(std::size_t N) {
  const Grid1D grid = make_grid(N);
  const Vector x = grid.nodes.head(static_cast<Eigen::Index>(N - 1));
  const double half_pi = std::numbers::pi / 2.0;
  const Vector mode1 = (half_pi * x).array().cos();
  const Vector mode3 = (3.0 * half_pi * x).array().cos();
  std::vector<Vector> guesses;
  for (int k : {1, 3, 5, 7}) {
    const Vector mode = (k * half_pi * x).array().cos();
    for (int step = 1; step <= 12; ++step) {
      const double c = 0.5 * step;
      guesses.emplace_back(c * mode);
      guesses.emplace_back(-c * mode);
    }
  }
  for (int a = -5; a <= 5; ++a) {
    for (int b = -5; b <= 5; ++b) {
      if (a == 0 || b == 0) continue;  // single modes are covered above
      guesses.emplace_back(a * mode1 + b * mode3);
    }
  }
  return guesses;
}

SolutionSearch find_solutions(const ParametricSystem& sys, double p, const std::vector<Vector>& guesses,
                              double dedupe_tol, double tol, std::size_t cap, kernels::Exec exec) {
  for (const auto& g : guesses) {
    if (static_cast<std::size_t>(g.size()) != sys.dimension) {
      throw NumericalError(ErrorKind::DimensionMismatch, "guess length differs from system dimension");
    }
  }
  const auto runs = kernels::multistart_newton(
      [&sys](const Vector& u, double q) { return sys.evaluate(u, q); },
      [&sys](const Vector& u, double q) { return sys.jacobian_u(u, q); }, guesses, p, tol, cap, exec);
  SolutionSearch out;
  for (const auto& run : runs) {
    if (!run.solution) {
      ++out.failed;
      continue;
    }
    const bool seen = std::any_of(out.solutions.begin(), out.solutions.end(), [&](const Vector& s) {
      return max_norm(s - *run.solution) <= dedupe_tol;
    });
    if (!seen) out.solutions.push_back(*run.solution);
  }
  std::stable_sort(out.solutions.begin(), out.solutions.end(),
                   [](const Vector& a, const Vector& b) { return max_norm(a) > max_norm(b); });
  return out;
}

std::vector<Vector> pde1d_solutions(std::size_t N, double p) {
  return find_solutions(build_pde1d(N), p, pde1d_guess_family(N), 1e-4).solutions;
}

std::vector<Vector> pde1d_branches(std::size_t N, double p) {
  std::vector<Vector> out{Vector::Zero(static_cast<Eigen::Index>(N - 1))};
  for (auto& s : pde1d_solutions(N, p))
    if (max_norm(s) > 1e-6) out.push_back(std::move(s));
  return out;
}

namespace {

struct CompetitionLayout {
  Eigen::Index N;
  double h;
  double d;
  Vector m;
  [[nodiscard]] Eigen::Index u(Eigen::Index i) const { return 1 + i; }
  [[nodiscard]] Eigen::Index v(Eigen::Index i) const { return 1 + N + i; }
};

// One advection-diffusion block: (d/h^2) D2 w - (a/2h) D1 w with the
// ghost-eliminated no-flux rows at both ends, applied at node i.
double transport(const CompetitionLayout& L, const Vector& w, Eigen::Index i, double a) {
  const double dh2 = L.d / (L.h * L.h);
  const Eigen::Index N = L.N;
  if (i == 0) return 2.0 * dh2 * w(1) - (2.0 * dh2 + 2.0 * a / L.h + a * a / L.d) * w(0);
  if (i == N - 1) return (-2.0 * dh2 + 2.0 * a / L.h - a * a / L.d) * w(N - 1) + 2.0 * dh2 * w(N - 2);
  return dh2 * (w(i + 1) - 2.0 * w(i) + w(i - 1)) - a / (2.0 * L.h) * (w(i + 1) - w(i - 1));
}

// d transport / d a at node i.
double transport_da(const CompetitionLayout& L, const Vector& w, Eigen::Index i, double a) {
  const Eigen::Index N = L.N;
  if (i == 0) return -(2.0 / L.h + 2.0 * a / L.d) * w(0);
  if (i == N - 1) return (2.0 / L.h - 2.0 * a / L.d) * w(N - 1);
  return -(w(i + 1) - w(i - 1)) / (2.0 * L.h);
}

// Writes d transport_i / d w_j into row `row` with column offset `col0`.
void transport_row(const CompetitionLayout& L, Eigen::Index i, double a, DenseMatrix& J, Eigen::Index row,
                   Eigen::Index col0) {
  const double dh2 = L.d / (L.h * L.h);
  const Eigen::Index N = L.N;
  if (i == 0) {
    J(row, col0 + 1) += 2.0 * dh2;
    J(row, col0) += -(2.0 * dh2 + 2.0 * a / L.h + a * a / L.d);
  } else if (i == N - 1) {
    J(row, col0 + N - 1) += -2.0 * dh2 + 2.0 * a / L.h - a * a / L.d;
    J(row, col0 + N - 2) += 2.0 * dh2;
  } else {
    J(row, col0 + i + 1) += dh2 - a / (2.0 * L.h);
    J(row, col0 + i) += -2.0 * dh2;
    J(row, col0 + i - 1) += dh2 + a / (2.0 * L.h);
  }
}

CompetitionLayout competition_layout(std::size_t N, double d) {
  if (!(d > 0)) throw NumericalError(ErrorKind::InvalidGrid, "diffusion rate must be positive");
  const Grid1D grid = make_grid(N);
  return {static_cast<Eigen::Index>(N), grid.h, d, (grid.nodes.array() + 1.0).matrix()};
}

// Resident block alone: N equations in u at fixed alpha.
Vector resident_residual(const CompetitionLayout& L, const Vector& u, double alpha) {
  Vector F(L.N);
  for (Eigen::Index i = 0; i < L.N; ++i) F(i) = transport(L, u, i, alpha) + u(i) * (L.m(i) - u(i));
  return F;
}

DenseMatrix resident_jacobian(const CompetitionLayout& L, const Vector& u, double alpha) {
  DenseMatrix J = DenseMatrix::Zero(L.N, L.N);
  for (Eigen::Index i = 0; i < L.N; ++i) {
    transport_row(L, i, alpha, J, i, 0);
    J(i, i) += L.m(i) - 2.0 * u(i);
  }
  return J;
}

}  // namespace

double trapezoid(const Vector& values, double h) {
  if (values.size() == 0) return 0.0;
  return h * (values.sum() - 0.5 * (values(0) + values(values.size() - 1)));
}

ParametricSystem build_competition(std::size_t N, double d) {
  const CompetitionLayout L = competition_layout(N, d);
  ParametricSystem sys;
  sys.name = "competition";
  sys.dimension = static_cast<std::size_t>(2 * L.N + 1);
  sys.evaluator = [L](const Vector& z, double alpha) {
    const double beta = z(0);
    const Vector u = z.segment(1, L.N);
    const Vector v = z.segment(1 + L.N, L.N);
    Vector F(2 * L.N + 1);
    for (Eigen::Index i = 0; i < L.N; ++i) {
      F(i) = transport(L, u, i, alpha) + u(i) * (L.m(i) - u(i));
      F(L.N + i) = transport(L, v, i, beta) + v(i) * (L.m(i) - u(i));
    }
    F(2 * L.N) = trapezoid(v, L.h) - 1.0;
    return F;
  };
  sys.analytic_jacobian_u = [L](const Vector& z, double alpha) {
    const double beta = z(0);
    const Vector u = z.segment(1, L.N);
    const Vector v = z.segment(1 + L.N, L.N);
    DenseMatrix J = DenseMatrix::Zero(2 * L.N + 1, 2 * L.N + 1);
    for (Eigen::Index i = 0; i < L.N; ++i) {
      transport_row(L, i, alpha, J, i, L.u(0));
      J(i, L.u(i)) += L.m(i) - 2.0 * u(i);
      const Eigen::Index row = L.N + i;
      transport_row(L, i, beta, J, row, L.v(0));
      J(row, L.v(i)) += L.m(i) - u(i);
      J(row, L.u(i)) += -v(i);
      J(row, 0) = transport_da(L, v, i, beta);
    }
    for (Eigen::Index i = 0; i < L.N; ++i) J(2 * L.N, L.v(i)) = L.h;
    J(2 * L.N, L.v(0)) = 0.5 * L.h;
    J(2 * L.N, L.v(L.N - 1)) = 0.5 * L.h;
    return J;
  };
  sys.analytic_jacobian_p = [L](const Vector& z, double alpha) {
    const Vector u = z.segment(1, L.N);
    Vector Fp = Vector::Zero(2 * L.N + 1);
    for (Eigen::Index i = 0; i < L.N; ++i) Fp(i) = transport_da(L, u, i, alpha);
    return Fp;
  };
  return sys;
}

Vector CompetitionState::pack() const {
  Vector z(1 + u.size() + v.size());
  z << beta, u, v;
  return z;
}

CompetitionState initial_resident(double alpha0, double d, std::size_t N) {
  if (!(alpha0 > 0)) throw NumericalError(ErrorKind::InvalidConfig, "alpha0 must be positive");
  const CompetitionLayout L = competition_layout(N, d);
  Vector u = L.m;
  double res = max_norm(resident_residual(L, u, alpha0));
  for (int it = 0; it < 50 && res > 1e-11; ++it) {
    try {
      u -= LuSolver(resident_jacobian(L, u, alpha0)).solve(resident_residual(L, u, alpha0));
    } catch (const NumericalError&) {
      break;
    }
    res = max_norm(resident_residual(L, u, alpha0));
  }
  if (!(res <= 1e-9)) throw NumericalError(ErrorKind::NewtonFailed, "resident equilibrium did not converge");
  CompetitionState state;
  state.alpha = alpha0;
  state.beta = alpha0;
  state.d = d;
  state.m = L.m;
  state.u = u;
  state.v = u / trapezoid(u, L.h);
  return state;
}

}  // namespace homotrack
