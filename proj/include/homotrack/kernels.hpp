#pragma once

// Embarrassingly parallel kernels. Each has a serial reference and an OpenMP
// variant that must agree with it bit-for-bit (columns/guesses are independent).

#include <functional>
#include <optional>
#include <vector>

#include "homotrack/linalg.hpp"

namespace homotrack::kernels {

enum class Exec { Serial, Parallel };

using ResidualFn = std::function<Vector(const Vector&, double)>;
using JacobianFn = std::function<DenseMatrix(const Vector&, double)>;

/// True when the library was built with OpenMP.
[[nodiscard]] bool parallel_available() noexcept;

/// Central-difference F_u, one column per perturbed component.
[[nodiscard]] DenseMatrix fd_jacobian(const ResidualFn& f, const Vector& u, double p, double scale, Exec exec);

struct NewtonRun {
  std::optional<Vector> solution;
  double residual = 0.0;
  std::size_t iterations = 0;
};

/// Plain Newton from each guess at fixed p. Order of results follows the guesses.
[[nodiscard]] std::vector<NewtonRun> multistart_newton(const ResidualFn& f, const JacobianFn& jac,
                                                       const std::vector<Vector>& guesses, double p, double tol,
                                                       std::size_t cap, Exec exec);

/// F evaluated at many parameter values (e.g. for scans). Order follows `ps`.
[[nodiscard]] std::vector<Vector> batch_evaluate(const ResidualFn& f, const std::vector<Vector>& us,
                                                 const std::vector<double>& ps, Exec exec);

}  // namespace homotrack::kernels
