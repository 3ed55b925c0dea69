#pragma once

// Dense linear-algebra kernel used by every tracker: direct solves, the
// smallest-|real part| eigenpair, null spaces and a forward Gauss-Seidel
// solver for symmetric positive semi-definite (possibly singular) systems.

#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "homotrack/errors.hpp"

namespace homotrack {

using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;

struct EigenPair {
  std::complex<double> value;
  /// Real, unit-norm direction. For a complex eigenvalue this is the re-normalized
  /// real part of the complex eigenvector.
  Vector vector;
};

struct IterativeSolveResult {
  Vector solution;
  std::size_t iterations = 0;
  double final_residual = 0.0;
};

[[nodiscard]] inline double max_norm(const Vector& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

/// Infinity norm (max absolute row sum).
[[nodiscard]] double matrix_norm_inf(const DenseMatrix& A);

enum class LuBackend { Auto, Dense, Sparse };

/// Partial-pivot LU that refuses pivots below 1e-14 * ||A||. `Auto` switches to a
/// sparse factorization for large matrices with few nonzeros (PDE Jacobians).
class LuSolver {
 public:
  explicit LuSolver(const DenseMatrix& A, LuBackend backend = LuBackend::Auto);

  [[nodiscard]] Vector solve(const Vector& b) const;
  [[nodiscard]] DenseMatrix solve(const DenseMatrix& B) const;
  /// Sign of det(A): +1 or -1.
  [[nodiscard]] int determinant_sign() const noexcept { return det_sign_; }
  [[nodiscard]] std::size_t size() const noexcept { return n_; }
  [[nodiscard]] bool is_sparse() const noexcept { return sparse_ != nullptr; }

  struct SparseFactor;

 private:
  std::size_t n_ = 0;
  Eigen::PartialPivLU<DenseMatrix> lu_;
  std::shared_ptr<const SparseFactor> sparse_;
  int det_sign_ = 1;
};

/// Solves A x = b. Throws NumericalError(SingularMatrix) on a vanishing pivot.
[[nodiscard]] Vector solve_dense(const DenseMatrix& A, const Vector& b);

/// Sign of det(A), or 0 when A is numerically singular.
[[nodiscard]] int determinant_sign(const DenseMatrix& A);

enum class EigenSide { Right, Left };

struct EigenOptions {
  /// Full dense decomposition up to this size, shift-invert Arnoldi above it.
  std::size_t dense_limit = 200;
  EigenSide side = EigenSide::Right;
  std::size_t krylov_dim = 40;
};

/// Eigenpair whose eigenvalue has the smallest |real part|. The returned vector is
/// unit-norm with its largest-magnitude component positive.
[[nodiscard]] EigenPair min_abs_real_eigenpair(const DenseMatrix& M, const EigenOptions& options = {});

/// Flips `v` when it points away from `reference`.
void align_sign(Vector& v, const Vector& reference);

/// Normalizes `v` and makes its largest-magnitude component positive.
void canonical_sign(Vector& v);

struct NullSpaceOptions {
  double relative_cutoff = 1e-8;
  double absolute_cutoff = 0.0;
};

/// Orthonormal basis of {x : A x = 0}; singular values at or below
/// max(relative_cutoff * sigma_max, absolute_cutoff) count as zero.
[[nodiscard]] std::vector<Vector> null_space(const DenseMatrix& A, const NullSpaceOptions& options = {});

/// Forward Gauss-Seidel sweeps on M x = b starting from x0, stopping when
/// ||residual_matrix * x - b||_2 <= tol. One sweep is one iteration. Rows with a
/// zero diagonal (possible for semi-definite M) keep their current value.
/// Throws IterationCapExceeded with the best iterate.
[[nodiscard]] IterativeSolveResult gauss_seidel(const DenseMatrix& M, const Vector& b, const Vector& x0,
                                                const DenseMatrix& residual_matrix, double tol,
                                                std::size_t cap);

/// Same, testing the residual against M itself.
[[nodiscard]] IterativeSolveResult gauss_seidel(const DenseMatrix& M, const Vector& b, const Vector& x0,
                                                double tol, std::size_t cap);

/// Smallest eigenpair of the symmetric positive semi-definite J^T J, computed from
/// the singular values of J (small n) or inverse iteration on J^T J (large n).
struct MinNormEigen {
  double value = 0.0;
  Vector vector;
};
[[nodiscard]] MinNormEigen min_gram_eigenpair(const DenseMatrix& J, std::size_t dense_limit = 200);

}  // namespace homotrack
