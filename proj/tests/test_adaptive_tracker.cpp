#include <doctest.h>

#include <cmath>
#include <random>

#include "homotrack/adaptive_tracker.hpp"

using namespace homotrack;

namespace {

struct Run {
  RegistryEntry entry;
  TrackerConfig config;
  PathPoint start;
};

Run ex11_run(double h = -0.2, std::uint64_t seed = 0) {
  Run r{registry_entry("ex11"), {}, {}};
  r.config.h = h;
  r.config.p_end = default_p_end(r.entry, h);
  r.config.rng_seed = seed;
  r.start = annotate_point(r.entry.system, r.entry.start_u, r.entry.start_p, r.config);
  return r;
}

}  // namespace

TEST_SUITE("adaptive_tracker") {
  TEST_CASE("annotate_point") {
    const auto r = ex11_run();
    CHECK(r.start.residual == 0.0);
    CHECK(r.start.det_sign != 0);
    CHECK(r.start.lambda_min != 0.0);
  }

  TEST_CASE("ex11 reaches the singular zone in a handful of steps") {
    const auto r = ex11_run();
    const auto result = track(r.entry.system, r.start, r.config);
    CHECK(result.stop == TrackStop::PseZone);
    CHECK(result.points.size() - 1 <= 12);
    for (const auto& p : result.points) CHECK(p.residual <= r.config.newton_tol);
    CHECK(std::abs(result.points.back().lambda_min) < std::abs(r.start.lambda_min));
  }

  TEST_CASE("steps move in the direction of h while s > 0") {
    const auto r = ex11_run();
    const auto cal = calibrate(r.entry.system, r.start, r.config);
    AdaptiveTracker tracker(r.entry.system, r.config, cal);
    const auto result = tracker.track(r.start);
    AdaptiveTracker probe(r.entry.system, r.config, cal);
    for (std::size_t i = 1; i < result.points.size(); ++i) {
      const auto st = probe.state_at(result.points[i - 1]);
      if (st.s > 0.0) CHECK((result.points[i].p - result.points[i - 1].p) * r.config.h > 0.0);
    }
  }

  TEST_CASE("at a generic point with s = 1 the parameter advances by exactly h") {
    const auto r = ex11_run();
    const auto cal = calibrate(r.entry.system, r.start, r.config);
    AdaptiveTracker tracker(r.entry.system, r.config, cal);
    auto st = tracker.state_at(r.start);
    st.s = 1.0;
    const auto next = tracker.step(st, r.config.h);
    REQUIRE(next);
    CHECK(std::abs(next->p - (r.start.p + r.config.h)) <= 10 * r.config.newton_tol);
  }

  TEST_CASE("augmented Jacobian keeps full rank on random linear systems") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> N01;
    for (int trial = 0; trial < 100; ++trial) {
      const int n = 1 + trial % 8;
      DenseMatrix A(n, n);
      Vector b(n), v(n);
      for (int i = 0; i < n; ++i) {
        b(i) = N01(rng);
        v(i) = N01(rng);
        for (int j = 0; j < n; ++j) A(i, j) = N01(rng) + (i == j ? 3.0 : 0.0);
      }
      ParametricSystem sys;
      sys.dimension = static_cast<std::size_t>(n);
      sys.evaluator = [A, b](const Vector& u, double p) -> Vector { return A * u + b * p; };
      StepState st;
      st.point.u = Vector::Zero(n);
      st.v = v.normalized();
      st.s = 0.1 + 0.9 * std::abs(std::sin(trial));
      st.g = 0.5;
      const DenseMatrix J = augmented_jacobian(sys, st, st.point.u, 0.0);
      Eigen::JacobiSVD<DenseMatrix> svd(J);
      CHECK(svd.singularValues()(n) > 1e-10 * svd.singularValues()(0));
    }
  }

  TEST_CASE("identical seeds give identical paths") {
    const auto a = ex11_run(-0.2, 42), b = ex11_run(-0.2, 42);
    const auto ra = track(a.entry.system, a.start, a.config);
    const auto rb = track(b.entry.system, b.start, b.config);
    REQUIRE(ra.points.size() == rb.points.size());
    for (std::size_t i = 0; i < ra.points.size(); ++i) {
      CHECK(ra.points[i].u == rb.points[i].u);
      CHECK(ra.points[i].p == rb.points[i].p);
    }
  }

  TEST_CASE("calibration refuses an empty interval") {
    auto r = ex11_run();
    r.config.p_end = r.start.p;
    CHECK_THROWS_AS((void)calibrate(r.entry.system, r.start, r.config), NumericalError);
  }

  TEST_CASE("invalid configs are rejected") {
    TrackerConfig c;
    c.h = 0.0;
    CHECK_THROWS_AS(c.validate(), NumericalError);
    c = {};
    c.k1 = 1.5;
    CHECK_THROWS_AS(c.validate(), NumericalError);
  }
}
