#include <doctest.h>

#include <cmath>

#include "homotrack/kernels.hpp"
#include "homotrack/pde.hpp"

using namespace homotrack;
using kernels::Exec;

TEST_SUITE("kernels") {
  TEST_CASE("fd_jacobian: OpenMP result is bit-identical to the serial reference") {
    const auto sys = build_pde1d(120);
    const Vector u = Vector::LinSpaced(119, 1.0, 0.0).array().sin();
    const DenseMatrix a = kernels::fd_jacobian(sys.evaluator, u, 4.0, 1e-6, Exec::Serial);
    const DenseMatrix b = kernels::fd_jacobian(sys.evaluator, u, 4.0, 1e-6, Exec::Parallel);
    CHECK(a == b);
    CHECK((a - sys.jacobian_u(u, 4.0)).cwiseAbs().maxCoeff() <= 1e-4 * sys.jacobian_u(u, 4.0).cwiseAbs().maxCoeff());
  }

  TEST_CASE("multistart_newton keeps guess order and agrees across executors") {
    // x^2 - p per component; roots +-sqrt(p)
    kernels::ResidualFn f = [](const Vector& u, double p) -> Vector { return u.array().square() - p; };
    kernels::JacobianFn J = [](const Vector& u, double) -> DenseMatrix { return (2.0 * u).asDiagonal(); };
    std::vector<Vector> guesses{Vector::Constant(2, 1.0), Vector::Constant(2, -3.0), Vector::Zero(2)};
    const auto s = kernels::multistart_newton(f, J, guesses, 4.0, 1e-12, 50, Exec::Serial);
    const auto p = kernels::multistart_newton(f, J, guesses, 4.0, 1e-12, 50, Exec::Parallel);
    REQUIRE(s.size() == 3);
    REQUIRE(s[0].solution);
    REQUIRE(s[1].solution);
    CHECK((*s[0].solution - Vector::Constant(2, 2.0)).norm() <= 1e-12);
    CHECK((*s[1].solution - Vector::Constant(2, -2.0)).norm() <= 1e-12);
    CHECK_FALSE(s[2].solution);  // singular Jacobian at the origin
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(s[i].iterations == p[i].iterations);
      CHECK(s[i].solution.has_value() == p[i].solution.has_value());
      if (s[i].solution) CHECK(*s[i].solution == *p[i].solution);
    }
  }

  TEST_CASE("batch_evaluate agrees across executors") {
    const auto sys = build_pde1d(60);
    std::vector<Vector> us;
    std::vector<double> ps;
    for (int k = 0; k < 16; ++k) {
      us.push_back(Vector::Constant(59, 0.1 * k));
      ps.push_back(0.5 * k);
    }
    const auto a = kernels::batch_evaluate(sys.evaluator, us, ps, Exec::Serial);
    const auto b = kernels::batch_evaluate(sys.evaluator, us, ps, Exec::Parallel);
    REQUIRE(a.size() == 16);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    CHECK(a[3] == sys.evaluate(us[3], ps[3]));
  }
}
