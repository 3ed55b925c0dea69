#pragma once

// Finite-difference discretizations of two boundary-value problems, exposed as
// ParametricSystems, plus multi-start Newton for finding solutions at fixed p.
//
//   pde1d:        u_xx = u^2 (u^2 - p),  u_x(0) = 0, u(1) = 0
//   competition:  resident u / invader v with directed movement along m(x) = 1 + x,
//                 unknowns (beta, u_1..u_N, v_1..v_N), parameter alpha

#include <cstddef>
#include <vector>

#include "homotrack/kernels.hpp"
#include "homotrack/model.hpp"

namespace homotrack {

/// Uniform grid on [0, 1] with N nodes, spacing 1/(N-1).
struct Grid1D {
  std::size_t N = 0;
  double h = 0.0;
  Vector nodes;
};

[[nodiscard]] Grid1D make_grid(std::size_t N);

/// N-1 unknowns at x_0..x_{N-2}; u(1) = 0 is eliminated and u_x(0) = 0 uses the
/// ghost value u_{-1} = u_1.
[[nodiscard]] ParametricSystem build_pde1d(std::size_t N);

/// Initial guesses: single cosine modes c cos(k pi x / 2) and two-mode mixtures
/// a cos(pi x / 2) + b cos(3 pi x / 2), sampled on the pde1d unknown nodes.
[[nodiscard]] std::vector<Vector> pde1d_guess_family(std::size_t N);

struct SolutionSearch {
  std::vector<Vector> solutions;  ///< sorted by max-norm, descending
  std::size_t failed = 0;         ///< guesses that did not converge
};

/// Newton from every guess at fixed p; keeps converged results (max-norm residual
/// <= tol) that differ pairwise by more than dedupe_tol in max norm.
[[nodiscard]] SolutionSearch find_solutions(const ParametricSystem& sys, double p, const std::vector<Vector>& guesses,
                                            double dedupe_tol, double tol = 1e-9, std::size_t cap = 60,
                                            kernels::Exec exec = kernels::Exec::Parallel);

/// Solutions of pde1d at p sorted by max norm (descending); the trivial solution is last.
[[nodiscard]] std::vector<Vector> pde1d_solutions(std::size_t N, double p);

/// Branch numbering: branch 1 is the trivial solution, branches 2, 3, ... are the
/// nontrivial solutions in descending max norm. Element k-1 holds branch k.
[[nodiscard]] std::vector<Vector> pde1d_branches(std::size_t N, double p);

/// 2N+1 unknowns (beta, u, v), parameter alpha. Rows: N resident rows, N invader
/// rows, trapezoid normalization of v.
[[nodiscard]] ParametricSystem build_competition(std::size_t N, double d);

struct CompetitionState {
  double beta = 0.0;
  Vector u;
  Vector v;
  double alpha = 0.0;
  double d = 1.0;
  Vector m;

  /// (beta, u, v) in the unknown ordering of build_competition.
  [[nodiscard]] Vector pack() const;
};

[[nodiscard]] double trapezoid(const Vector& values, double h);

/// Resident equilibrium at alpha0 (Newton from u = m), v = u / trapezoid(u), beta = alpha0.
[[nodiscard]] CompetitionState initial_resident(double alpha0, double d, std::size_t N);

}  // namespace homotrack
