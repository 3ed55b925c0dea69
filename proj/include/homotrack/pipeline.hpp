#pragma once

// End-to-end runs: track -> endgame -> tangent cone -> seed -> track new branches,
// plus the baseline run and the route-by-route comparison of the two trackers.

#include <optional>
#include <string>
#include <vector>

#include "homotrack/adaptive_tracker.hpp"
#include "homotrack/baseline_tracker.hpp"
#include "homotrack/pse_endgame.hpp"
#include "homotrack/tangent_cone.hpp"

namespace homotrack {

struct BranchRecord {
  std::size_t id = 0;
  std::size_t depth = 0;
  std::optional<std::size_t> parent_bifurcation;
  double h = 0.0;  ///< signed step the branch started with
  std::vector<PathPoint> points;
  std::size_t attempts = 0;
  /// Cumulative attempts when each point was accepted (traditional runs only).
  std::vector<std::size_t> attempts_at;
  double wall_seconds = 0.0;
  std::string stop_reason;

  [[nodiscard]] std::size_t steps() const { return points.empty() ? 0 : points.size() - 1; }
};

struct BifurcationEntry {
  BifurcationRecord record;
  std::size_t branch_id = 0;
  std::size_t null_dim = 0;
  std::string cone = "none";
  Eigen::Matrix2d hessian = Eigen::Matrix2d::Zero();
  std::vector<TangentDirection> directions;
  std::size_t seeds = 0;
  /// Index into the branch's points of the last point before the singular point.
  std::size_t point_index = 0;
  /// Solver attempts spent on the branch up to and including this point's endgame.
  std::size_t attempts_before = 0;
};

struct RunReport {
  std::string problem;
  std::string tracker;  ///< "adaptive" or "traditional"
  TrackerConfig config;
  std::vector<BranchRecord> branches;
  std::vector<BifurcationEntry> bifurcations;
  std::vector<std::string> notes;
  double wall_seconds = 0.0;
  bool failed = false;
};

struct PipelineOptions {
  /// Branch points below this depth spawn every outgoing direction as a new branch;
  /// deeper ones continue along the direction closest to the incoming one.
  std::size_t branch_depth = 1;
  /// End a branch after passing this many folds (0: never).
  std::size_t stop_after_folds = 0;
  /// Parameter window for branches that reverse direction; defaults to [p0, p_end].
  std::optional<std::pair<double, double>> window;
  std::size_t max_branches = 16;
  /// Visited-region test: stop within this fraction of |h| of earlier points.
  double visited_fraction = 0.5;
  /// End a branch at its first branch point instead of seeding from it.
  bool stop_at_branch_point = false;
  /// False when the start itself sits near a singular point (e.g. a branch seed).
  bool start_armed = true;
};

[[nodiscard]] RunReport run_adaptive(const ParametricSystem& sys, const Vector& u0, double p0,
                                     const TrackerConfig& config, const PipelineOptions& options = {});

/// Single traditional run; localized det F_u sign changes are reported as bifurcations.
[[nodiscard]] RunReport run_baseline(const ParametricSystem& sys, const Vector& u0, double p0,
                                     const TrackerConfig& config);

struct CompareRow {
  std::string route;
  std::string tracker;
  std::size_t steps = 0;          ///< includes prefix_steps
  std::size_t prefix_steps = 0;   ///< shared path up to the switch point
  std::size_t attempts = 0;       ///< solver attempts, accepted or not, including the prefix
  double wall_seconds = 0.0;
  std::vector<std::pair<double, double>> bifurcations;  ///< (u_0, p) estimates along the route
  double end_u0 = 0.0;
  double end_p = 0.0;
  std::string status;
};

struct CompareOptions {
  PipelineOptions pipeline;
  /// Also compare each branch leaving the first branch point (seeded identically for both trackers).
  bool switch_routes = true;
};

/// Route-by-route comparison. "main" follows the start branch straight through branch
/// points; "switch-k" leaves the first branch point along its k-th outgoing seed.
[[nodiscard]] std::vector<CompareRow> compare_trackers(const ParametricSystem& sys, const Vector& u0, double p0,
                                                       const TrackerConfig& config, const CompareOptions& options = {});

struct GsRow {
  double epsilon = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Gauss-Seidel on (A + eps I) x = b for A = [[1,-1,0],[-1,2,-1],[0,-1,1]], b = (-1,-1,2),
/// x0 = b, tol 1e-8, eps in {1, 1e-1, 1e-2, 1e-3, 1e-4, 0}.
[[nodiscard]] std::vector<GsRow> gauss_seidel_table(std::size_t cap = 1000000);

}  // namespace homotrack
