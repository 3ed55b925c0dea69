#include <doctest.h>

#include <cmath>

#include "homotrack/pipeline.hpp"

using namespace homotrack;

namespace {

struct Setup {
  RegistryEntry entry;
  TrackerConfig config;
  PipelineOptions options;
};

Setup setup(const std::string& name, double h) {
  Setup s{registry_entry(name), {}, {}};
  s.config.h = h;
  s.config.p_end = default_p_end(s.entry, h);
  s.config.newton_tol = s.entry.newton_tol;
  s.options.branch_depth = s.entry.branch_depth;
  s.options.stop_after_folds = s.entry.stop_after_folds;
  s.options.window = std::pair{std::min(s.entry.p_min, s.entry.start_p), std::max(s.entry.p_max, s.entry.start_p)};
  return s;
}

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("gauss_seidel_table reproduces the published counts") {
    const auto rows = gauss_seidel_table();
    const std::size_t expected[] = {18, 100, 852, 6982, 54470, 2};
    REQUIRE(rows.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK(rows[i].converged);
      CHECK(rows[i].iterations == expected[i]);
    }
    for (std::size_t i = 1; i < 5; ++i) CHECK(rows[i].iterations > rows[i - 1].iterations);
  }

  TEST_CASE("ex21 from (1, 1): one branch point, three outgoing branches") {
    auto s = setup("ex21", -0.1);
    const auto r = run_adaptive(s.entry.system, Vector::Constant(1, 1.0), 1.0, s.config, s.options);
    CHECK_FALSE(r.failed);
    REQUIRE(r.bifurcations.size() == 1);
    CHECK(r.bifurcations[0].cone == "two_lines");
    CHECK(r.bifurcations[0].seeds == 3);
    CHECK(r.branches.size() == 4);
    CHECK(std::abs(r.bifurcations[0].record.p_b) <= 1e-6);
    for (const auto& b : r.branches) {
      CHECK(b.steps() + 1 == b.points.size());
      CHECK(b.attempts >= b.steps());
      if (b.id > 0) CHECK(b.parent_bifurcation == std::optional<std::size_t>{0});
    }
  }

  TEST_CASE("ex23 finds both diagonal branch points at depth 2") {
    auto s = setup("ex23", -0.1);
    CHECK(s.options.branch_depth == 2);
    const auto r = run_adaptive(s.entry.system, s.entry.start_u, s.entry.start_p, s.config, s.options);
    int found = 0;
    for (const auto& b : r.bifurcations) {
      if (b.null_dim != 2) continue;
      if (std::abs(b.record.p_b - 0.661035) < 5e-3 || std::abs(b.record.p_b - 0.0845418) < 5e-3) ++found;
    }
    CHECK(found == 2);
    CHECK(r.branches.size() <= PipelineOptions{}.max_branches);
  }

  TEST_CASE("ex22 passes the fold; traditional tracking stalls there") {
    auto s = setup("ex22", 0.1);
    CompareOptions co;
    co.pipeline = s.options;
    const auto rows = compare_trackers(s.entry.system, s.entry.start_u, s.entry.start_p, s.config, co);
    REQUIRE_FALSE(rows.empty());
    for (const auto& row : rows) {
      if (row.tracker == "adaptive") {
        CHECK(row.status == "passed_fold");
        CHECK(row.attempts <= 25);
      } else {
        CHECK(row.status == "stagnated");
        CHECK(row.end_p == doctest::Approx(1.0).epsilon(1e-3));
      }
    }
  }

  TEST_CASE("compare rows pair up and count their prefix") {
    auto s = setup("ex23", -0.1);
    CompareOptions co;
    co.pipeline = s.options;
    const auto rows = compare_trackers(s.entry.system, s.entry.start_u, s.entry.start_p, s.config, co);
    REQUIRE(rows.size() % 2 == 0);
    for (std::size_t i = 0; i < rows.size(); i += 2) {
      CHECK(rows[i].route == rows[i + 1].route);
      CHECK(rows[i].tracker == "adaptive");
      CHECK(rows[i + 1].tracker == "traditional");
      CHECK(rows[i].steps >= rows[i].prefix_steps);
      CHECK(rows[i].steps < rows[i + 1].steps);
    }
  }

  TEST_CASE("baseline report") {
    auto s = setup("ex11", -0.2);
    const auto r = run_baseline(s.entry.system, s.entry.start_u, s.entry.start_p, s.config);
    REQUIRE(r.branches.size() == 1);
    CHECK(r.tracker == "traditional");
    CHECK(r.branches[0].stop_reason == "stagnated");
    CHECK(r.branches[0].attempts_at.size() == r.branches[0].points.size());
  }
}
