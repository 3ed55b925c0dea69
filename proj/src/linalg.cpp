#include "homotrack/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace homotrack {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::IterationCapExceeded: return "IterationCapExceeded";
    case ErrorKind::UnknownProblem: return "UnknownProblem";
    case ErrorKind::InvalidGrid: return "InvalidGrid";
    case ErrorKind::NewtonFailed: return "NewtonFailed";
    case ErrorKind::CalibrationFailed: return "CalibrationFailed";
    case ErrorKind::MaxStepsExceeded: return "MaxStepsExceeded";
    case ErrorKind::EigenFailure: return "EigenFailure";
    case ErrorKind::NoRoot: return "NoRoot";
    case ErrorKind::IllConditionedFit: return "IllConditionedFit";
    case ErrorKind::AllCandidatesFailed: return "AllCandidatesFailed";
    case ErrorKind::NotABifurcation: return "NotABifurcation";
    case ErrorKind::UnsupportedCorank: return "UnsupportedCorank";
    case ErrorKind::NoBranchFound: return "NoBranchFound";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

double matrix_norm_inf(const DenseMatrix& A) {
  if (A.size() == 0) return 0.0;
  return A.cwiseAbs().rowwise().sum().maxCoeff();
}

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;

// SparseLU keeps the diagonal of U inside its supernodal L store; exposing it
// gives the same pivot test as the dense path.
class PivotSparseLU : public Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> {
 public:
  double min_abs_pivot() const {
    double smallest = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < this->cols(); ++j) {
      for (SCMatrix::InnerIterator it(m_Lstore, j); it; ++it) {
        if (it.index() == j) {
          smallest = std::min(smallest, std::abs(it.value()));
          break;
        }
      }
    }
    return smallest;
  }
};

constexpr Eigen::Index kSparseMinSize = 120;
constexpr double kSparseMaxDensity = 0.05;

}  // namespace

struct LuSolver::SparseFactor {
  PivotSparseLU lu;
};

LuSolver::LuSolver(const DenseMatrix& A, LuBackend backend) {
  if (A.rows() != A.cols() || A.rows() == 0) {
    throw NumericalError(ErrorKind::DimensionMismatch, "LU needs a non-empty square matrix");
  }
  n_ = static_cast<std::size_t>(A.rows());
  const double scale = matrix_norm_inf(A);
  const double floor = 1e-14 * scale;
  bool use_sparse = backend == LuBackend::Sparse;
  if (backend == LuBackend::Auto && A.rows() >= kSparseMinSize) {
    const auto nnz = (A.array() != 0.0).count();
    use_sparse = static_cast<double>(nnz) <= kSparseMaxDensity * static_cast<double>(A.size());
  }
  if (use_sparse) {
    auto factor = std::make_shared<SparseFactor>();
    SparseMatrix S = A.sparseView();
    S.makeCompressed();
    factor->lu.compute(S);
    if (factor->lu.info() != Eigen::Success || !(factor->lu.min_abs_pivot() > floor)) {
      throw NumericalError(ErrorKind::SingularMatrix, "sparse pivot below 1e-14*||A||");
    }
    det_sign_ = factor->lu.signDeterminant() < 0 ? -1 : 1;
    sparse_ = std::move(factor);
    return;
  }
  lu_.compute(A);
  const auto& LU = lu_.matrixLU();
  for (Eigen::Index i = 0; i < LU.rows(); ++i) {
    if (!(std::abs(LU(i, i)) > floor)) {
      throw NumericalError(ErrorKind::SingularMatrix, "pivot " + std::to_string(i) + " below 1e-14*||A||");
    }
  }
  double sign = lu_.permutationP().determinant();
  for (Eigen::Index i = 0; i < LU.rows(); ++i) {
    if (LU(i, i) < 0) sign = -sign;
  }
  det_sign_ = sign < 0 ? -1 : 1;
}

Vector LuSolver::solve(const Vector& b) const {
  if (static_cast<std::size_t>(b.size()) != n_) throw NumericalError(ErrorKind::DimensionMismatch, "rhs length");
  if (sparse_) return sparse_->lu.solve(b);
  return lu_.solve(b);
}

DenseMatrix LuSolver::solve(const DenseMatrix& B) const {
  if (static_cast<std::size_t>(B.rows()) != n_) throw NumericalError(ErrorKind::DimensionMismatch, "rhs rows");
  if (sparse_) {
    DenseMatrix X(B.rows(), B.cols());
    for (Eigen::Index j = 0; j < B.cols(); ++j) X.col(j) = sparse_->lu.solve(Vector(B.col(j)));
    return X;
  }
  return lu_.solve(B);
}

Vector solve_dense(const DenseMatrix& A, const Vector& b) {
  if (A.rows() != A.cols() || A.rows() != b.size()) {
    throw NumericalError(ErrorKind::DimensionMismatch, "solve_dense expects square A matching b");
  }
  return LuSolver(A).solve(b);
}

int determinant_sign(const DenseMatrix& A) {
  try {
    return LuSolver(A).determinant_sign();
  } catch (const NumericalError& e) {
    if (e.kind() == ErrorKind::SingularMatrix) return 0;
    throw;
  }
}

void align_sign(Vector& v, const Vector& reference) {
  if (reference.size() == v.size() && v.dot(reference) < 0) v = -v;
}

void canonical_sign(Vector& v) {
  const double nrm = v.norm();
  if (!(nrm > 0)) return;
  v /= nrm;
  const double biggest = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= biggest * (1.0 - 1e-12)) {
      if (v(i) < 0) v = -v;
      return;
    }
  }
}

namespace {

using ComplexVector = Eigen::VectorXcd;

// Index of the eigenvalue with the smallest |real part|; near-ties prefer the
// non-negative imaginary member so conjugate pairs resolve deterministically.
Eigen::Index pick_min_abs_real(const ComplexVector& values) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    const double a = std::abs(values(i).real());
    const double b = std::abs(values(best).real());
    const double tie = 1e-12 * (1.0 + b);
    if (a < b - tie) {
      best = i;
    } else if (std::abs(a - b) <= tie) {
      const bool i_upper = values(i).imag() >= 0;
      const bool best_upper = values(best).imag() >= 0;
      if (i_upper && !best_upper) best = i;
    }
  }
  return best;
}

Vector real_direction(const ComplexVector& z) {
  Vector re = z.real();
  Vector im = z.imag();
  // Rotate the complex phase so the real part carries the most weight.
  if (im.norm() > 1e-12 * (1.0 + re.norm())) {
    const double a = re.squaredNorm() - im.squaredNorm();
    const double b = 2.0 * re.dot(im);
    const double theta = 0.5 * std::atan2(b, a);
    re = std::cos(theta) * z.real() + std::sin(theta) * z.imag();
  }
  Vector v = re;
  canonical_sign(v);
  return v;
}

EigenPair dense_eigenpair(const DenseMatrix& M) {
  Eigen::EigenSolver<DenseMatrix> solver(M, true);
  if (solver.info() != Eigen::Success) {
    throw NumericalError(ErrorKind::NoConvergence, "dense eigen decomposition failed");
  }
  const ComplexVector values = solver.eigenvalues();
  const Eigen::Index k = pick_min_abs_real(values);
  EigenPair pair;
  pair.value = values(k);
  pair.vector = real_direction(solver.eigenvectors().col(k));
  return pair;
}

// Shift-invert Arnoldi at zero: Ritz values of M^{-1} with the largest modulus
// belong to the eigenvalues of M closest to the origin.
std::optional<EigenPair> arnoldi_eigenpair(const DenseMatrix& M, std::size_t krylov_dim) {
  const Eigen::Index n = M.rows();
  std::optional<LuSolver> lu;
  try {
    lu.emplace(M);
  } catch (const NumericalError&) {
    return std::nullopt;
  }
  const Eigen::Index m = std::min<Eigen::Index>(static_cast<Eigen::Index>(krylov_dim), n);
  DenseMatrix V = DenseMatrix::Zero(n, m + 1);
  DenseMatrix H = DenseMatrix::Zero(m + 1, m);
  Vector start(n);
  for (Eigen::Index i = 0; i < n; ++i) start(i) = 1.0 + 0.5 * std::sin(0.7 * static_cast<double>(i) + 0.3);
  V.col(0) = start.normalized();
  Eigen::Index used = m;
  for (Eigen::Index j = 0; j < m; ++j) {
    Vector w = lu->solve(Vector(V.col(j)));
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index i = 0; i <= j; ++i) {
        const double c = V.col(i).dot(w);
        H(i, j) += c;
        w -= c * V.col(i);
      }
    }
    const double beta = w.norm();
    H(j + 1, j) = beta;
    if (beta < 1e-14 * H.block(0, 0, j + 1, j + 1).norm()) {
      used = j + 1;
      break;
    }
    V.col(j + 1) = w / beta;
  }
  const DenseMatrix Hm = H.block(0, 0, used, used);
  Eigen::EigenSolver<DenseMatrix> small(Hm, true);
  if (small.info() != Eigen::Success) return std::nullopt;
  const ComplexVector theta = small.eigenvalues();
  const double theta_max = theta.cwiseAbs().maxCoeff();
  const double beta_last = used < m || used == n ? 0.0 : H(used, used - 1);

  ComplexVector lambda(theta.size());
  std::vector<Eigen::Index> accepted;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    if (std::abs(theta(i)) < 1e-10 * theta_max) continue;
    const double ritz_residual = std::abs(beta_last * small.eigenvectors()(used - 1, i));
    if (ritz_residual > 1e-9 * std::abs(theta(i))) continue;
    lambda(i) = 1.0 / theta(i);
    accepted.push_back(i);
  }
  if (accepted.empty()) return std::nullopt;
  ComplexVector candidates(static_cast<Eigen::Index>(accepted.size()));
  for (std::size_t i = 0; i < accepted.size(); ++i) candidates(static_cast<Eigen::Index>(i)) = lambda(accepted[i]);
  const Eigen::Index pick = accepted[static_cast<std::size_t>(pick_min_abs_real(candidates))];

  const Eigen::MatrixXcd basis = V.leftCols(used).cast<std::complex<double>>();
  const ComplexVector x = basis * small.eigenvectors().col(pick);
  EigenPair pair;
  pair.value = lambda(pick);
  pair.vector = real_direction(x);
  // Verify against M directly; a bad Ritz vector falls back to the dense path.
  const Eigen::VectorXcd xn = x / x.norm();
  const double residual = (M.cast<std::complex<double>>() * xn - pair.value * xn).norm();
  if (residual > 1e-7 * std::max(1.0, matrix_norm_inf(M))) return std::nullopt;
  return pair;
}

}  // namespace

EigenPair min_abs_real_eigenpair(const DenseMatrix& M, const EigenOptions& options) {
  if (M.rows() != M.cols() || M.rows() == 0) {
    throw NumericalError(ErrorKind::DimensionMismatch, "eigenpair needs a square matrix");
  }
  if (!M.allFinite()) throw NumericalError(ErrorKind::NoConvergence, "non-finite matrix entries");
  const DenseMatrix target = options.side == EigenSide::Left ? DenseMatrix(M.transpose()) : M;
  if (static_cast<std::size_t>(target.rows()) > options.dense_limit) {
    if (auto pair = arnoldi_eigenpair(target, options.krylov_dim)) return *pair;
  }
  return dense_eigenpair(target);
}

std::vector<Vector> null_space(const DenseMatrix& A, const NullSpaceOptions& options) {
  if (A.size() == 0) return {};
  Eigen::BDCSVD<DenseMatrix> svd(A, Eigen::ComputeFullV);
  const Vector& sigma = svd.singularValues();
  const double smax = sigma.size() > 0 ? sigma(0) : 0.0;
  const double cutoff = std::max(options.relative_cutoff * smax, options.absolute_cutoff);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > cutoff) ++rank;
  }
  std::vector<Vector> basis;
  for (Eigen::Index j = rank; j < A.cols(); ++j) basis.emplace_back(svd.matrixV().col(j));
  return basis;
}

IterativeSolveResult gauss_seidel(const DenseMatrix& M, const Vector& b, const Vector& x0,
                                  const DenseMatrix& residual_matrix, double tol, std::size_t cap) {
  const Eigen::Index n = M.rows();
  if (M.cols() != n || b.size() != n || x0.size() != n || residual_matrix.rows() != n ||
      residual_matrix.cols() != n) {
    throw NumericalError(ErrorKind::DimensionMismatch, "gauss_seidel operand sizes");
  }
  Vector x = x0;
  Vector best = x;
  double residual = (residual_matrix * x - b).norm();
  double best_residual = residual;
  std::size_t iterations = 0;
  while (residual > tol) {
    if (iterations >= cap) throw IterationCapExceeded(cap, best, best_residual);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double diag = M(i, i);
      if (diag == 0.0) continue;
      double sum = b(i);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j != i) sum -= M(i, j) * x(j);
      }
      x(i) = sum / diag;
    }
    ++iterations;
    residual = (residual_matrix * x - b).norm();
    if (!std::isfinite(residual)) throw IterationCapExceeded(iterations, best, best_residual);
    if (residual < best_residual) {
      best_residual = residual;
      best = x;
    }
  }
  return {x, iterations, residual};
}

IterativeSolveResult gauss_seidel(const DenseMatrix& M, const Vector& b, const Vector& x0, double tol,
                                  std::size_t cap) {
  return gauss_seidel(M, b, x0, M, tol, cap);
}

MinNormEigen min_gram_eigenpair(const DenseMatrix& J, std::size_t dense_limit) {
  const Eigen::Index n = J.cols();
  if (n == 0) throw NumericalError(ErrorKind::DimensionMismatch, "empty Jacobian");
  auto from_svd = [&]() {
    Eigen::BDCSVD<DenseMatrix> svd(J, Eigen::ComputeFullV);
    MinNormEigen out;
    const Vector& s = svd.singularValues();
    // J may be wide; missing singular values are zero.
    const double smin = s.size() < n ? 0.0 : s(n - 1);
    out.value = smin * smin;
    out.vector = svd.matrixV().col(n - 1);
    canonical_sign(out.vector);
    return out;
  };
  if (static_cast<std::size_t>(n) <= dense_limit || J.rows() != n) return from_svd();
  try {
    LuSolver lu(J);
    const LuSolver lut(DenseMatrix(J.transpose()));
    Vector x = Vector::Ones(n).normalized();
    for (int it = 0; it < 100; ++it) {
      Vector y = lu.solve(lut.solve(x));
      y.normalize();
      const double change = std::min((y - x).norm(), (y + x).norm());
      x = y;
      if (change < 1e-12) break;
    }
    canonical_sign(x);
    return {(J * x).squaredNorm(), x};
  } catch (const NumericalError&) {
    return from_svd();
  }
}

}  // namespace homotrack
