#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace homotrack {

/// Failure categories shared by every module. The CLI maps them to exit codes.
enum class ErrorKind {
  DimensionMismatch,
  SingularMatrix,
  NoConvergence,
  IterationCapExceeded,
  UnknownProblem,
  InvalidGrid,
  NewtonFailed,
  CalibrationFailed,
  MaxStepsExceeded,
  EigenFailure,
  NoRoot,
  IllConditionedFit,
  AllCandidatesFailed,
  NotABifurcation,
  UnsupportedCorank,
  NoBranchFound,
  InvalidConfig,
};

const char* to_string(ErrorKind kind) noexcept;

class NumericalError : public std::runtime_error {
 public:
  NumericalError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by iterative solvers that run out of iterations; carries the best iterate seen.
class IterationCapExceeded : public NumericalError {
 public:
  IterationCapExceeded(std::size_t cap, Eigen::VectorXd best, double best_residual)
      : NumericalError(ErrorKind::IterationCapExceeded,
                       "no convergence within " + std::to_string(cap) + " iterations"),
        cap_(cap),
        best_(std::move(best)),
        best_residual_(best_residual) {}

  [[nodiscard]] std::size_t cap() const noexcept { return cap_; }
  [[nodiscard]] const Eigen::VectorXd& best_iterate() const noexcept { return best_; }
  [[nodiscard]] double best_residual() const noexcept { return best_residual_; }

 private:
  std::size_t cap_;
  Eigen::VectorXd best_;
  double best_residual_;
};

/// Newton-type failure with the best iterate attached.
class ConvergenceFailure : public NumericalError {
 public:
  ConvergenceFailure(const std::string& what, Eigen::VectorXd best, double best_residual)
      : NumericalError(ErrorKind::NoConvergence, what),
        best_(std::move(best)),
        best_residual_(best_residual) {}

  [[nodiscard]] const Eigen::VectorXd& best_iterate() const noexcept { return best_; }
  [[nodiscard]] double best_residual() const noexcept { return best_residual_; }

 private:
  Eigen::VectorXd best_;
  double best_residual_;
};

}  // namespace homotrack
