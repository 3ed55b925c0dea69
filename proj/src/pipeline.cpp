#include "homotrack/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>

#include "homotrack/errors.hpp"

namespace homotrack {
namespace {

using Clock = std::chrono::steady_clock;

/// A null direction of [F_u, F_p] is a turning point only when its p-component is
/// (nearly) zero; otherwise the point is regular.
constexpr double kFoldTangentP = 0.1;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Vector stack(const Vector& u, double p) {
  Vector z(u.size() + 1);
  z << u, p;
  return z;
}

double sign_of(double x, double fallback) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : fallback); }

struct Task {
  PathPoint start;
  double h = 0.0;
  std::size_t depth = 0;
  std::optional<std::size_t> parent;
  bool armed = true;
};

class Runner {
 public:
  Runner(const ParametricSystem& sys, const TrackerConfig& config, const PipelineOptions& options, double p0)
      : sys_(sys), config_(config), options_(options) {
    if (options.window) {
      lo_ = std::min(options.window->first, options.window->second);
      hi_ = std::max(options.window->first, options.window->second);
    } else {
      lo_ = std::min(p0, config.p_end);
      hi_ = std::max(p0, config.p_end);
    }
  }

  RunReport run(const Vector& u0, double p0) {
    const auto t0 = Clock::now();
    report_.tracker = "adaptive";
    report_.config = config_;
    const PathPoint start = annotate_point(sys_, u0, p0, config_);
    if (start.residual > std::max(1e-6, 1e3 * config_.newton_tol)) {
      report_.notes.push_back("start point is not on the solution set (residual " + std::to_string(start.residual) +
                              ")");
    }
    if (is_singular(start)) {
      seed_from_singular_start(start);
    } else {
      queue_.push_back({start, config_.h, 0, std::nullopt, options_.start_armed});
    }
    while (!queue_.empty() && report_.branches.size() < options_.max_branches) {
      Task task = std::move(queue_.front());
      queue_.pop_front();
      run_branch(task);
    }
    if (!queue_.empty()) report_.notes.push_back("branch limit reached; " + std::to_string(queue_.size()) +
                                                 " seeds not tracked");
    report_.wall_seconds = seconds_since(t0);
    return std::move(report_);
  }

 private:
  bool is_singular(const PathPoint& pt) const {
    return pt.det_sign == 0 || std::abs(pt.lambda_min) <= config_.ill_cond_lambda;
  }

  double end_for(double h) const { return h < 0.0 ? lo_ : hi_; }

  void seed_from_singular_start(const PathPoint& start) {
    BifurcationEntry entry;
    entry.record.u_b = start.u;
    entry.record.p_b = start.p;
    entry.record.residual = start.residual;
    entry.record.converged = true;
    try {
      classify(entry);
    } catch (const NumericalError& e) {
      report_.notes.push_back(std::string("singular start: ") + e.what());
      report_.failed = true;
      return;
    }
    std::vector<TangentDirection> forward;
    for (const auto& d : entry.directions)
      if (d.delta_p * config_.h > 1e-8) forward.push_back(d);
    std::vector<BranchSeed> seeds;
    try {
      seeds = seed_branches(sys_, entry.record, forward, {std::abs(config_.h), {}, 10.0}, config_);
    } catch (const NumericalError& e) {
      report_.notes.push_back(std::string("singular start: ") + e.what());
    }
    entry.seeds = seeds.size();
    const std::size_t idx = add_bifurcation(std::move(entry));
    for (auto& s : seeds) queue_.push_back({s.point, config_.h, 0, idx, false});
    if (seeds.empty()) report_.failed = true;
  }

  std::size_t add_bifurcation(BifurcationEntry entry) {
    report_.bifurcations.push_back(std::move(entry));
    return report_.bifurcations.size() - 1;
  }

  /// Fills null_dim, kind, cone and directions. Folds get +/- the single null direction.
  void classify(BifurcationEntry& entry) const {
    const TangentFrame frame = build_frame(sys_, entry.record.u_b, entry.record.p_b);
    entry.null_dim = frame.null_dim;
    if (frame.null_dim == 1) {
      const double norm = std::hypot(frame.Q1.norm(), frame.q1);
      if (std::abs(frame.q1) > kFoldTangentP * norm) {
        entry.record.kind = BifurcationKind::Unclassified;
        entry.cone = "regular";
        return;
      }
      entry.record.kind = BifurcationKind::Fold;
      entry.cone = "fold";
      TangentDirection d;
      d.a = Eigen::Vector2d(1.0, 0.0);
      d.delta_u = frame.Q1 / norm;
      d.delta_p = frame.q1 / norm;
      TangentDirection m = d;
      m.a = -d.a;
      m.delta_u = -d.delta_u;
      m.delta_p = -d.delta_p;
      entry.directions = {d, m};
      return;
    }
    entry.record.kind = BifurcationKind::BranchPoint;
    const QuadraticModel model = quadratic_model(sys_, frame, entry.record.u_b, entry.record.p_b);
    entry.hessian = model.H;
    ConeResult cone = cone_directions(model.H, frame);
    entry.cone = to_string(cone.kind);
    entry.directions = std::move(cone.directions);
  }

  /// Index of an already recorded bifurcation within `radius` of (u_b, p_b).
  std::optional<std::size_t> known_bifurcation(const Vector& zb, double radius) const {
    for (std::size_t i = 0; i < report_.bifurcations.size(); ++i) {
      const auto& r = report_.bifurcations[i].record;
      if ((stack(r.u_b, r.p_b) - zb).norm() < radius) return i;
    }
    return std::nullopt;
  }

  bool visited(const PathPoint& pt, const std::vector<Vector>& own_old, double h) const {
    const Vector z = stack(pt.u, pt.p);
    const double radius = options_.visited_fraction * std::abs(h);
    for (const auto& b : report_.bifurcations)
      if ((stack(b.record.u_b, b.record.p_b) - z).norm() < 2.0 * std::abs(h)) return false;
    auto near = [&](const Vector& w) { return (w - z).norm() < radius; };
    if (std::any_of(own_old.begin(), own_old.end(), near)) return true;
    for (const auto& br : report_.branches)
      for (const auto& q : br.points)
        if (near(stack(q.u, q.p))) return true;
    return false;
  }

  void run_branch(const Task& task) {
    const auto t0 = Clock::now();
    BranchRecord br;
    br.id = report_.branches.size();
    br.depth = task.depth;
    br.parent_bifurcation = task.parent;
    br.h = task.h;
    br.points.push_back(task.start);
    if (task.parent) br.attempts += 1;  // the seeding solve

    PathPoint cur = task.start;
    double h = task.h;
    bool armed = task.armed;
    std::size_t folds = 0;
    std::vector<Vector> own_old;  // earlier segments of this branch
    constexpr std::size_t kMaxSegments = 64;

    auto finish = [&](std::string reason) {
      br.stop_reason = std::move(reason);
      for (std::size_t i = 0; i < br.points.size(); ++i) br.points[i].index = i;
      br.wall_seconds = seconds_since(t0);
      report_.branches.push_back(std::move(br));
    };

    for (std::size_t segment = 0; segment < kMaxSegments; ++segment) {
      TrackerConfig cfg = config_;
      cfg.h = h;
      cfg.p_end = end_for(h);
      if ((cur.p - cfg.p_end) * h >= 0.0) return finish("reached_end");
      std::optional<AdaptiveTracker> tracker;
      try {
        tracker.emplace(sys_, cfg, calibrate(sys_, cur, cfg));
      } catch (const NumericalError& e) {
        return finish(std::string("calibration_failed: ") + e.what());
      }
      TrackOptions topt;
      // A start already inside the zone would stop at once; arm only after leaving it.
      topt.armed = armed && std::abs(cur.lambda_min) >= tracker->zone_threshold();
      topt.arm_distance = 2.0 * std::abs(h);
      const std::size_t segment_start = br.points.size() - 1;
      topt.stop_when = [&](const PathPoint& pt) { return visited(pt, own_old, h); };
      TrackResult tr = tracker->track(cur, topt);
      br.points.insert(br.points.end(), tr.points.begin() + 1, tr.points.end());

      if (tr.stop == TrackStop::ReachedEnd || tr.stop == TrackStop::MaxSteps || tr.stop == TrackStop::StepFailed ||
          tr.stop == TrackStop::Hook) {
        br.attempts += tracker->attempts();
        return finish(tr.stop == TrackStop::Hook ? "visited" : to_string(tr.stop));
      }

      // Endgame on the trailing samples; a failed crossing refinement leaves a
      // flipped last point which cannot belong to the window.
      std::vector<PathPoint> path(br.points.begin() + static_cast<std::ptrdiff_t>(segment_start), br.points.end());
      if (tr.stop == TrackStop::Crossing && path.size() > 1) path.pop_back();
      const auto window = endgame_window(path, cfg.pse_samples);
      BifurcationEntry entry;
      entry.branch_id = br.id;
      entry.point_index = br.points.size() - 1;
      try {
        entry.record = refine_bifurcation(*tracker, window);
      } catch (const NumericalError& e) {
        br.attempts += tracker->attempts();
        return finish(std::string("endgame_failed: ") + e.what());
      }
      br.attempts += tracker->attempts();
      br.points.insert(br.points.end(), entry.record.new_samples.begin(), entry.record.new_samples.end());
      entry.record.new_samples.clear();
      entry.point_index = br.points.size() - 1;
      entry.attempts_before = br.attempts;

      const Vector zb = stack(entry.record.u_b, entry.record.p_b);
      const PathPoint& last = br.points.back();
      const Vector back = stack(last.u, last.p) - zb;
      try {
        classify(entry);
      } catch (const NumericalError& e) {
        add_bifurcation(std::move(entry));
        return finish(std::string("unclassified: ") + e.what());
      }
      if (entry.record.kind == BifurcationKind::Unclassified) {
        // Full-rank [F_u, F_p] with a tangent that still moves in p: nothing singular here.
        report_.notes.push_back("branch " + std::to_string(br.id) + ": regular point near p=" +
                                std::to_string(entry.record.p_b) + " skipped");
        cur = br.points.back();
        armed = false;
        continue;
      }
      if (entry.directions.empty()) {
        add_bifurcation(std::move(entry));
        return finish("isolated_point");
      }

      const bool fold = entry.null_dim == 1;
      const bool spawn = !fold && task.depth < options_.branch_depth && !options_.stop_at_branch_point;
      if (spawn) {
        if (auto known = known_bifurcation(zb, std::abs(h))) {
          return finish("known_bifurcation:" + std::to_string(*known));
        }
      }
      std::vector<BranchSeed> seeds;
      try {
        seeds = seed_branches(sys_, entry.record, entry.directions, {std::abs(h), back, 10.0}, config_);
      } catch (const NumericalError& e) {
        entry.seeds = 0;
        add_bifurcation(std::move(entry));
        return finish(std::string("seeding_failed: ") + e.what());
      }
      entry.seeds = seeds.size();
      const std::size_t idx = add_bifurcation(std::move(entry));
      const double p_b = report_.bifurcations[idx].record.p_b;

      if (fold) {
        ++folds;
        if (options_.stop_after_folds > 0 && folds >= options_.stop_after_folds) {
          // Keep the first point beyond the turning point as evidence it was passed.
          if (!seeds.empty()) {
            br.points.push_back(seeds.front().point);
            br.attempts += 1;
          }
          return finish("passed_fold");
        }
      } else if (options_.stop_at_branch_point) {
        return finish("branch_point");
      } else if (spawn) {
        for (const auto& s : seeds) {
          const double hs = std::abs(h) * sign_of(s.point.p - p_b, sign_of(s.direction.delta_p, sign_of(h, -1.0)));
          queue_.push_back({s.point, hs, task.depth + 1, idx, false});
        }
        return finish("branched");
      }

      // Continue this branch along the seed closest to the incoming direction.
      const Vector incoming = -back;
      const BranchSeed* best = nullptr;
      double best_angle = 1e300;
      for (const auto& s : seeds) {
        const double a = angle_deg(s.direction.stacked(), incoming);
        if (a < best_angle) {
          best_angle = a;
          best = &s;
        }
      }
      if (best == nullptr) return finish("no_continuation");
      for (std::size_t i = segment_start; i < br.points.size(); ++i) own_old.push_back(stack(br.points[i].u, br.points[i].p));
      cur = best->point;
      br.points.push_back(cur);
      br.attempts += 1;
      h = std::abs(h) * sign_of(cur.p - p_b, -sign_of(h, -1.0));
      armed = false;
    }
    finish("segment_limit");
  }

  const ParametricSystem& sys_;
  TrackerConfig config_;
  PipelineOptions options_;
  double lo_ = 0.0;
  double hi_ = 0.0;
  RunReport report_;
  std::deque<Task> queue_;
};

}  // namespace

RunReport run_adaptive(const ParametricSystem& sys, const Vector& u0, double p0, const TrackerConfig& config,
                       const PipelineOptions& options) {
  config.validate();
  RunReport rep = Runner(sys, config, options, p0).run(u0, p0);
  rep.problem = sys.name;
  return rep;
}

RunReport run_baseline(const ParametricSystem& sys, const Vector& u0, double p0, const TrackerConfig& config) {
  config.validate();
  const auto t0 = Clock::now();
  RunReport rep;
  rep.problem = sys.name;
  rep.tracker = "traditional";
  rep.config = config;
  BranchRecord br;
  br.h = config.h;
  try {
    const PathPoint start = annotate_point(sys, u0, p0, config);
    BaselineResult res = track_trial_and_error(sys, start, config);
    br.points = std::move(res.points);
    br.attempts_at = std::move(res.attempts_at);
    br.attempts = res.attempts;
    br.stop_reason = res.stop == BaselineStop::ReachedEnd ? "reached_end"
                     : res.stop == BaselineStop::Stagnated ? "stagnated"
                                                           : "max_steps";
    for (std::size_t i = 0; i < res.crossings.size(); ++i) {
      const PathPoint& c = res.crossings[i];
      BifurcationEntry e;
      e.attempts_before = res.crossing_attempts[i];
      e.record.u_b = c.u;
      e.record.p_b = c.p;
      e.record.residual = c.residual;
      e.point_index = c.index;
      rep.bifurcations.push_back(std::move(e));
    }
    if (res.stop == BaselineStop::Stagnated) {
      BifurcationEntry e;
      e.record.u_b = res.stagnation.u;
      e.record.p_b = res.stagnation.p;
      e.record.residual = res.stagnation.residual;
      e.point_index = br.points.empty() ? 0 : br.points.size() - 1;
      e.attempts_before = res.attempts;
      e.cone = "stagnation";
      rep.bifurcations.push_back(std::move(e));
    }
  } catch (const NumericalError& e) {
    rep.failed = true;
    rep.notes.push_back(e.what());
    br.stop_reason = "failed";
  }
  for (std::size_t i = 0; i < br.points.size(); ++i) br.points[i].index = i;
  br.wall_seconds = seconds_since(t0);
  rep.branches.push_back(std::move(br));
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

namespace {

CompareRow branch_row(const std::string& route, const RunReport& rep, std::size_t branch_id) {
  CompareRow row;
  row.route = route;
  row.tracker = rep.tracker;
  const auto& br = rep.branches.at(branch_id);
  row.steps = br.steps();
  row.attempts = br.attempts;
  row.wall_seconds = br.wall_seconds;
  for (const auto& b : rep.bifurcations)
    if (b.branch_id == branch_id && b.record.u_b.size() > 0) row.bifurcations.emplace_back(b.record.u_b(0), b.record.p_b);
  if (!br.points.empty()) {
    row.end_u0 = br.points.back().u(0);
    row.end_p = br.points.back().p;
  }
  row.status = br.stop_reason;
  for (const auto& note : rep.notes) row.status += "; " + note;
  return row;
}

void add_prefix(CompareRow& row, std::size_t steps, std::size_t attempts,
                std::vector<std::pair<double, double>> bifs) {
  row.prefix_steps = steps;
  row.steps += steps;
  row.attempts += attempts;
  bifs.insert(bifs.end(), row.bifurcations.begin(), row.bifurcations.end());
  row.bifurcations = std::move(bifs);
}

}  // namespace

std::vector<CompareRow> compare_trackers(const ParametricSystem& sys, const Vector& u0, double p0,
                                         const TrackerConfig& config, const CompareOptions& options) {
  std::vector<CompareRow> rows;
  PipelineOptions main_opt = options.pipeline;
  if (!main_opt.window) main_opt.window = std::pair{std::min(p0, config.p_end), std::max(p0, config.p_end)};
  const double lo = std::min(main_opt.window->first, main_opt.window->second);
  const double hi = std::max(main_opt.window->first, main_opt.window->second);
  main_opt.branch_depth = 0;
  const RunReport adaptive = run_adaptive(sys, u0, p0, config, main_opt);

  auto baseline_from = [&](const PathPoint& seed, double h) {
    TrackerConfig cfg = config;
    cfg.h = h;
    cfg.p_end = h < 0.0 ? lo : hi;
    return run_baseline(sys, seed.u, seed.p, cfg);
  };

  const bool singular_start = !adaptive.branches.empty() && adaptive.branches.front().parent_bifurcation.has_value();
  if (singular_start || adaptive.branches.empty()) {
    // Every route leaves the singular start along its own seed; both trackers share it.
    for (std::size_t k = 0; k < adaptive.branches.size(); ++k) {
      const auto& br = adaptive.branches[k];
      const std::string route = "seed-" + std::to_string(k);
      rows.push_back(branch_row(route, adaptive, k));
      const RunReport base = baseline_from(br.points.front(), br.h);
      rows.push_back(branch_row(route, base, 0));
    }
    if (adaptive.branches.empty()) {
      CompareRow row;
      row.route = "main";
      row.tracker = adaptive.tracker;
      row.status = "no branch leaves the singular start";
      rows.push_back(row);
    }
    return rows;
  }

  rows.push_back(branch_row("main", adaptive, 0));
  const RunReport baseline = run_baseline(sys, u0, p0, config);
  rows.push_back(branch_row("main", baseline, 0));
  if (!options.switch_routes) return rows;

  // First branch point on the main route and the seeds that leave it.
  const auto& main_branch = adaptive.branches.front();
  const BifurcationEntry* first = nullptr;
  for (const auto& b : adaptive.bifurcations)
    if (b.branch_id == 0 && b.null_dim == 2 && !b.directions.empty()) {
      first = &b;
      break;
    }
  if (first == nullptr) return rows;
  const Vector zb = stack(first->record.u_b, first->record.p_b);
  const PathPoint& before = main_branch.points.at(first->point_index);
  const Vector back = stack(before.u, before.p) - zb;
  std::vector<BranchSeed> seeds;
  try {
    seeds = seed_branches(sys, first->record, first->directions, {std::abs(config.h), back, 10.0}, config);
  } catch (const NumericalError&) {
    return rows;
  }
  // The seed closest to the incoming direction is the main route itself.
  std::size_t straight = 0;
  double best = 1e300;
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    const double a = angle_deg(seeds[k].direction.stacked(), -back);
    if (a < best) {
      best = a;
      straight = k;
    }
  }
  // Baseline prefix: up to its point nearest the branch point.
  std::optional<std::size_t> base_prefix;
  std::size_t base_prefix_attempts = 0;
  std::pair<double, double> base_bif;
  {
    const auto& bp = baseline.branches.front();
    std::size_t nearest = 0;
    double base_dist = 1e300;
    for (std::size_t i = 0; i < bp.points.size(); ++i) {
      const double d = (stack(bp.points[i].u, bp.points[i].p) - zb).norm();
      if (d < base_dist) {
        base_dist = d;
        nearest = i;
      }
    }
    if (base_dist < 10.0 * std::abs(config.h)) {
      base_prefix = nearest;
      base_prefix_attempts = bp.attempts_at.at(nearest);
      base_bif = {bp.points[nearest].u(0), bp.points[nearest].p};
    }
  }

  PipelineOptions switch_opt = main_opt;
  switch_opt.stop_at_branch_point = true;
  switch_opt.start_armed = false;
  std::size_t route_no = 0;
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    if (k == straight) continue;
    const auto& seed = seeds[k];
    const std::string route = "switch-" + std::to_string(++route_no);
    const double h = std::abs(config.h) * sign_of(seed.point.p - first->record.p_b, sign_of(seed.direction.delta_p, 1.0));
    TrackerConfig cfg = config;
    cfg.h = h;
    cfg.p_end = h < 0.0 ? lo : hi;
    const RunReport ad = run_adaptive(sys, seed.point.u, seed.point.p, cfg, switch_opt);
    CompareRow arow = branch_row(route, ad, 0);
    add_prefix(arow, first->point_index + 1, first->attempts_before + 1, {{first->record.u_b(0), first->record.p_b}});
    rows.push_back(std::move(arow));
    if (base_prefix) {
      const RunReport base = baseline_from(seed.point, h);
      CompareRow brow = branch_row(route, base, 0);
      add_prefix(brow, *base_prefix, base_prefix_attempts, {base_bif});
      rows.push_back(std::move(brow));
    } else {
      CompareRow brow;
      brow.route = route;
      brow.tracker = baseline.tracker;
      brow.status = "baseline path never came near this branch point";
      rows.push_back(std::move(brow));
    }
  }
  return rows;
}

std::vector<GsRow> gauss_seidel_table(std::size_t cap) {
  DenseMatrix A(3, 3);
  A << 1, -1, 0, -1, 2, -1, 0, -1, 1;
  Vector b(3);
  b << -1, -1, 2;
  std::vector<GsRow> rows;
  for (double eps : {1.0, 1e-1, 1e-2, 1e-3, 1e-4, 0.0}) {
    const DenseMatrix M = A + eps * DenseMatrix::Identity(3, 3);
    GsRow row{eps, cap, false};
    try {
      // The residual is measured on the matrix being iterated (see the README).
      const auto res = gauss_seidel(M, b, b, M, 1e-8, cap);
      row.iterations = res.iterations;
      row.converged = true;
    } catch (const IterationCapExceeded&) {
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace homotrack
