#include <doctest.h>

#include <random>

#include "homotrack/inflation.hpp"

using namespace homotrack;

namespace {

DenseMatrix random_matrix(std::mt19937_64& rng, int n, int m) {
  std::normal_distribution<double> N01;
  DenseMatrix A(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) A(i, j) = N01(rng);
  return A;
}

}  // namespace

TEST_SUITE("inflation") {
  TEST_CASE("inflated matrix is positive semi-definite") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 200; ++trial) {
      const int n = 2 + trial % 19;
      DenseMatrix J = random_matrix(rng, n, n);
      if (trial % 3 == 0) J.row(0) = J.row(1);
      const auto sys = assemble_inflated(J, random_matrix(rng, n, 1));
      Eigen::SelfAdjointEigenSolver<DenseMatrix> es(sys.matrix);
      CHECK(es.eigenvalues().minCoeff() >= -1e-10 * sys.matrix.norm());
      CHECK(sys.lambda_min >= -1e-12 * J.squaredNorm());
    }
  }

  TEST_CASE("update is invariant under shifts along (v, -1)") {
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 50; ++trial) {
      const int n = 2 + trial % 10;
      const auto sys = assemble_inflated(random_matrix(rng, n, n), random_matrix(rng, n, 1));
      const auto upd = solve_inflated(sys, 1e-12, 5000);
      Vector raw(n + 1), shift(n + 1);
      raw << upd.delta_u_tilde, upd.alpha;
      shift << sys.v, -1.0;
      for (double t : {-2.0, 0.3, 5.0})
        CHECK((split_inflated(sys, raw + t * shift).delta_u - upd.delta_u).norm() <= 1e-10 * (1.0 + upd.delta_u.norm()));
    }
  }

  TEST_CASE("agrees with Newton on nonsingular Jacobians") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 50; ++trial) {
      const int n = 2 + trial % 8;
      const DenseMatrix J = random_matrix(rng, n, n) + 4.0 * DenseMatrix::Identity(n, n);
      const Vector F = random_matrix(rng, n, 1);
      const Vector newton = -J.lu().solve(F);
      const auto upd = solve_inflated(assemble_inflated(J, F), 1e-14, 5000);
      CHECK((upd.delta_u - newton).norm() <= 1e-6 * newton.norm());
    }
  }

  TEST_CASE("inflated_newton converges at a singular root") {
    // F(x) = x^2 at p = 0: the root is double, J(0) = 0.
    ParametricSystem sys;
    sys.dimension = 1;
    sys.evaluator = [](const Vector& u, double p) -> Vector { return u.array().square() - p; };
    TrackerConfig config;
    config.newton_tol = 1e-10;
    config.inflation_newton_cap = 200;
    const auto r = inflated_newton(sys, Vector::Constant(1, 0.5), 0.0, config);
    CHECK(r.residual <= 1e-10);
    CHECK(std::abs(r.u(0)) <= 1e-4);
  }
}
