#include <doctest.h>

#include <cmath>

#include "homotrack/pse_endgame.hpp"

using namespace homotrack;

TEST_SUITE("pse_endgame") {
  TEST_CASE("estimate_leading_exponent recovers pure powers") {
    for (double x : {1.0 / 3.0, 0.5, 1.0, 2.0}) {
      const double lam = 0.1;
      auto y = [&](double l) { return 2.0 * std::pow(l, x); };
      CHECK(estimate_leading_exponent(y(lam), y(0.5 * lam), y(0.25 * lam), 0.5, 0.25) ==
            doctest::Approx(x).epsilon(1e-8));
    }
  }

  TEST_CASE("estimate_leading_exponent tolerates a higher-order remainder") {
    // y = C l^x + D l^(x+1/3), |D/C| = 1/4; the error grows with |D/C| (about 0.08 at 1/2).
    for (double x : {0.5, 1.0, 1.5}) {
      for (double lam : {0.1, 0.05, 0.01}) {
        auto y = [&](double l) { return 1.0 + 4.0 * std::pow(l, x) + std::pow(l, x + 1.0 / 3.0); };
        CHECK(std::abs(estimate_leading_exponent(y(lam), y(0.5 * lam), y(0.25 * lam), 0.5, 0.25) - x) <= 0.05);
      }
    }
  }

  TEST_CASE("fit_puiseux is exact on data in its span") {
    std::vector<double> lam{0.1, 0.08, 0.05, 0.03, 0.02, 0.01};
    DenseMatrix values(6, 2);
    for (int i = 0; i < 6; ++i) {
      const double t = std::cbrt(lam[static_cast<std::size_t>(i)]);
      values(i, 0) = 1.0 - 2.0 * t + 0.5 * t * t;
      values(i, 1) = -3.0 + t * t * t;
    }
    const auto m = fit_puiseux(lam, values, 3, 3);
    CHECK(m.residual <= 1e-12);
    CHECK(m.constant(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.constant(1) == doctest::Approx(-3.0).epsilon(1e-12));
  }

  TEST_CASE("select_winding finds c = 3 and is scale-invariant") {
    std::vector<double> lam{0.2, 0.12, 0.07, 0.04, 0.02};
    DenseMatrix values(5, 1);
    for (int i = 0; i < 5; ++i) values(i, 0) = 0.7 * std::cbrt(lam[static_cast<std::size_t>(i)]) - 0.1 * lam[static_cast<std::size_t>(i)];
    const auto a = select_winding(lam, values, 6, default_terms(5));
    CHECK(a.c == 3);
    std::vector<double> scaled = lam;
    for (auto& l : scaled) l *= 37.0;
    CHECK(select_winding(scaled, values, 6, default_terms(5)).c == a.c);
  }

  TEST_CASE("default_terms") {
    CHECK(default_terms(5) == 3);
    CHECK(default_terms(20) == 6);
  }

  TEST_CASE("pchip interpolates monotonically") {
    const std::vector<double> xs{0.0, 1.0, 2.0, 3.0}, ys{0.0, 1.0, 1.0, 4.0};
    CHECK(pchip(xs, ys, 1.0) == doctest::Approx(1.0));
    const double mid = pchip(xs, ys, 1.5);
    CHECK(mid >= 1.0);
    CHECK(mid <= 1.0 + 1e-12);  // flat segment stays flat
  }

  TEST_CASE("endgame_window keeps the strictly decreasing tail") {
    std::vector<PathPoint> path(6);
    const double lam[] = {0.5, 0.2, 0.4, 0.3, 0.1, 0.05};
    for (std::size_t i = 0; i < path.size(); ++i) path[i].lambda_min = lam[i];
    const auto w = endgame_window(path, 5);
    REQUIRE(w.size() == 4);
    CHECK(w.front().lambda_min == 0.4);
    CHECK(w.back().lambda_min == 0.05);
  }

  TEST_CASE("ilex endgame lands on the origin with winding 3") {
    const auto e = registry_entry("ilex");
    TrackerConfig config;
    config.h = -0.1;
    config.p_end = default_p_end(e, config.h);
    const auto start = annotate_point(e.system, e.start_u, e.start_p, config);
    const auto cal = calibrate(e.system, start, config);
    AdaptiveTracker tracker(e.system, config, cal);
    const auto tr = tracker.track(start);
    REQUIRE(tr.stop == TrackStop::PseZone);
    const auto rec = refine_bifurcation(tracker, endgame_window(tr.points, config.pse_samples));
    CHECK(rec.c1 == 3);
    CHECK(std::max(max_norm(rec.u_b), std::abs(rec.p_b)) <= 5e-4);
    CHECK(rec.residual <= 1e-6);
  }
}
