// Acceptance harness: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   acceptance [criterion...]     (default: all of 1..9)
//
// Step ratios compare solver attempts (accepted or rejected) for both trackers;
// the traditional tracker's trial-and-error cost lives in its rejected attempts.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "homotrack/inflation.hpp"
#include "homotrack/pde.hpp"
#include "homotrack/pipeline.hpp"
#include "homotrack/report.hpp"

#ifndef HOMOTRACK_CLI_PATH
#define HOMOTRACK_CLI_PATH "homotrack"
#endif

using namespace homotrack;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "!") + what;
    pass = pass && ok;
  }
};

std::string fmt(const char* f, auto... xs) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, xs...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Setup {
  RegistryEntry entry;
  TrackerConfig config;
  PipelineOptions options;
};

Setup setup(const std::string& name, double h, const ProblemParams& params = {}) {
  Setup s{registry_entry(name, params), {}, {}};
  s.config.h = h;
  s.config.p_end = default_p_end(s.entry, h);
  s.config.newton_tol = s.entry.newton_tol;
  s.options.branch_depth = s.entry.branch_depth;
  s.options.stop_after_folds = s.entry.stop_after_folds;
  s.options.window = std::pair{std::min(s.entry.p_min, s.entry.start_p), std::max(s.entry.p_max, s.entry.start_p)};
  return s;
}

const CompareRow* find_row(const std::vector<CompareRow>& rows, const std::string& route, const std::string& tracker) {
  for (const auto& r : rows)
    if (r.route == route && r.tracker == tracker) return &r;
  return nullptr;
}

// 1 ------------------------------------------------------------------------

Verdict gauss_seidel_table_exact() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = gauss_seidel_table();
  const std::vector<std::size_t> expected{18, 100, 852, 6982, 54470, 2};
  std::string got;
  bool ok = rows.size() == expected.size();
  for (std::size_t i = 0; ok && i < rows.size(); ++i) {
    const long diff = static_cast<long>(rows[i].iterations) - static_cast<long>(expected[i]);
    ok = rows[i].converged && std::labs(diff) <= 1;
    got += (i ? "," : "") + std::to_string(rows[i].iterations);
  }
  v.check(ok, "iterations {" + got + "}");
  const double t = seconds_since(t0);
  v.check(t < 5.0, fmt("%.3f s", t));
  return v;
}

// 2 ------------------------------------------------------------------------

Verdict ilex_endgame() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  auto s = setup("ilex", -0.1);
  s.config.pse_samples = 5;
  const Vector start = s.entry.start_u;
  v.check(start.size() == 2 && start(0) == -1.0 && start(1) == 2.0 && s.entry.start_p == 1.0, "start (-1,2,1)");
  s.options.branch_depth = 0;
  const auto report = run_adaptive(s.entry.system, start, s.entry.start_p, s.config, s.options);
  if (report.bifurcations.empty()) {
    v.check(false, "no endgame");
    return v;
  }
  const auto& rec = report.bifurcations.front().record;
  v.check(rec.c1 == 3, fmt("c1=%d", rec.c1));
  const double dist = std::max(max_norm(rec.u_b), std::abs(rec.p_b));
  v.check(dist <= 5e-4, fmt("|(x,y,p)|inf=%.2e", dist));
  const double t = seconds_since(t0);
  v.check(t < 1.0, fmt("%.3f s", t));
  return v;
}

// 3 ------------------------------------------------------------------------

Verdict ex11_turning_point() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  auto s = setup("ex11", -0.2);
  const auto& sys = s.entry.system;
  const PathPoint start = annotate_point(sys, s.entry.start_u, s.entry.start_p, s.config);
  const auto tr = track(sys, start, s.config);
  const std::size_t steps = tr.points.size() - 1;
  v.check(tr.stop == TrackStop::PseZone && steps <= 12, fmt("zone after %zu steps (%s)", steps, to_string(tr.stop)));

  s.options.branch_depth = 0;
  const auto report = run_adaptive(sys, s.entry.start_u, s.entry.start_p, s.config, s.options);
  if (report.bifurcations.empty()) {
    v.check(false, "no bifurcation");
  } else {
    const auto& rec = report.bifurcations.front().record;
    v.check(max_norm(rec.u_b) <= 1e-3 && std::abs(rec.p_b) <= 1e-4,
            fmt("|x|,|y|<=%.1e |p|=%.1e", max_norm(rec.u_b), std::abs(rec.p_b)));
  }
  const auto base = track_trial_and_error(sys, start, s.config);
  v.check(base.stop == BaselineStop::Stagnated && base.attempts >= 13,
          fmt("baseline %s after %zu attempts", to_string(base.stop), base.attempts));
  const double t = seconds_since(t0);
  v.check(t < 1.0, fmt("%.3f s", t));
  return v;
}

// 4 ------------------------------------------------------------------------

Verdict ex21_tangent_cone() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  const auto sys = builtin("ex21");
  const Vector zero = Vector::Zero(1);
  const auto frame = build_frame(sys, zero, 0.0);
  const auto quad = quadratic_model(sys, frame, zero, 0.0);
  const auto cone = cone_directions(quad.H, frame);
  const double r = 1.0 / std::sqrt(2.0);
  const std::vector<std::pair<double, double>> expected{{r, r}, {-r, -r}, {-r, r}, {r, -r}};
  double worst = 0.0;
  for (const auto& [ex, ep] : expected) {
    double best = 1e300;
    for (const auto& d : cone.directions) best = std::min(best, std::hypot(d.delta_u(0) - ex, d.delta_p - ep));
    worst = std::max(worst, best);
  }
  v.check(cone.directions.size() == 4 && worst <= 1e-6, fmt("%zu directions, max dev %.1e", cone.directions.size(), worst));

  auto s = setup("ex21", -0.1);
  s.options.branch_depth = 1;
  const auto report = run_adaptive(sys, Vector::Constant(1, 1.0), 1.0, s.config, s.options);
  const std::size_t seeds = report.bifurcations.empty() ? 0 : report.bifurcations.front().seeds;
  v.check(report.bifurcations.size() == 1 && seeds == 3 && report.branches.size() == 4,
          fmt("%zu bifurcation(s), %zu outgoing, %zu branches", report.bifurcations.size(), seeds,
              report.branches.size()));
  const double t = seconds_since(t0);
  v.check(t < 1.0, fmt("%.3f s", t));
  return v;
}

// 5 ------------------------------------------------------------------------

Verdict ex22_circles() {
  Verdict v;
  auto s = setup("ex22", 0.1);
  const auto& sys = s.entry.system;
  v.check(std::abs(s.entry.start_u(0) - 0.5) < 1e-12 && std::abs(s.entry.start_p - std::sqrt(0.75)) < 1e-12,
          "start (1/2, sqrt3/2)");
  const auto report = run_adaptive(sys, s.entry.start_u, s.entry.start_p, s.config, s.options);

  // The start is itself a crossing; the one at p = -sqrt(3)/2 has to be found by the endgame.
  auto down = s;
  down.config.h = -0.1;
  down.config.p_end = default_p_end(down.entry, down.config.h);
  const auto below = run_adaptive(sys, s.entry.start_u, s.entry.start_p, down.config, down.options);
  for (const auto* run : {&report, &below}) {
    const double target = run == &report ? std::sqrt(0.75) : -std::sqrt(0.75);
    double dev = 1e300;
    for (const auto& b : run->bifurcations) {
      if (b.null_dim != 2) continue;
      if (run == &below && b.point_index == 0) continue;
      dev = std::min(dev, std::max(std::abs(b.record.u_b(0) - 0.5), std::abs(b.record.p_b - target)));
    }
    v.check(dev <= 5e-3, fmt("(0.5, %.4f) off by %.1e", target, dev));
  }
  bool all_passed = !report.branches.empty();
  std::size_t worst_steps = 0;
  for (const auto& b : report.branches) {
    all_passed = all_passed && b.stop_reason == "passed_fold";
    worst_steps = std::max(worst_steps, b.attempts);
  }
  v.check(all_passed, "adaptive branches pass the fold");
  v.check(worst_steps <= 25, fmt("adaptive %zu attempts", worst_steps));

  // Traditional tracking from the same seeds stalls at p = 1.
  std::size_t stalled = 0;
  std::size_t branches = 0;
  for (const auto& b : report.branches) {
    ++branches;
    const PathPoint start = annotate_point(sys, b.points.front().u, b.points.front().p, s.config);
    auto config = s.config;
    config.h = b.h;
    const auto base = track_trial_and_error(sys, start, config);
    if (base.stop == BaselineStop::Stagnated && std::abs(base.final_h) < 1e-9 &&
        std::abs(std::abs(base.stagnation.p) - 1.0) < 1e-3)
      ++stalled;
  }
  v.check(branches > 0 && stalled == branches, fmt("baseline stalls at |p|=1 on %zu/%zu", stalled, branches));
  return v;
}

// 6 ------------------------------------------------------------------------

Verdict ex23_unfolding() {
  Verdict v;
  auto s = setup("ex23", -0.1);
  const auto& sys = s.entry.system;
  const auto report = run_adaptive(sys, s.entry.start_u, s.entry.start_p, s.config, s.options);
  auto near = [&](double t) {
    for (const auto& b : report.bifurcations)
      if (b.null_dim == 2 && std::abs(b.record.u_b(0) - t) <= 5e-3 && std::abs(b.record.p_b - t) <= 5e-3) return true;
    return false;
  };
  v.check(near(0.6609), "x=p=0.6609");
  v.check(near(0.084), "x=p=0.084");

  CompareOptions co;
  co.pipeline = s.options;
  const auto rows = compare_trackers(sys, s.entry.start_u, s.entry.start_p, s.config, co);
  std::set<std::string> routes;
  for (const auto& r : rows) routes.insert(r.route);
  for (const auto& route : routes) {
    const auto* a = find_row(rows, route, "adaptive");
    const auto* b = find_row(rows, route, "traditional");
    if (!a || !b) continue;
    v.check(a->steps < b->steps && a->attempts < b->attempts,
            fmt("%s %zu/%zu steps %zu/%zu attempts", route.c_str(), a->steps, b->steps, a->attempts, b->attempts));
  }
  v.check(routes.size() >= 2, fmt("%zu routes", routes.size()));
  return v;
}

// 7 ------------------------------------------------------------------------

Verdict pde1d_branches_ratio() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  constexpr std::size_t N = 360;
  const auto solutions = pde1d_solutions(N, 18.0);
  v.check(solutions.size() >= 7, fmt("%zu solutions at p=18", solutions.size()));
  const auto branches = pde1d_branches(N, 18.0);
  const auto sys = build_pde1d(N);
  TrackerConfig config;
  config.h = -0.4;
  config.p_end = 0.0;
  config.newton_tol = 1e-8;
  PipelineOptions options;
  options.branch_depth = 0;
  options.window = std::pair{0.0, 18.0};
  for (std::size_t k = 2; k <= 5 && k <= branches.size(); ++k) {
    const auto a = run_adaptive(sys, branches[k - 1], 18.0, config, options);
    const auto b = run_baseline(sys, branches[k - 1], 18.0, config);
    const double ratio =
        static_cast<double>(a.branches.front().attempts) / static_cast<double>(b.branches.front().attempts);
    const bool reached = std::abs(a.branches.front().points.back().p) < 1e-9 ||
                         a.branches.front().stop_reason == "reached_end";
    v.check(reached && ratio <= 0.8, fmt("b%zu %zu/%zu=%.2f", k, a.branches.front().attempts,
                                          b.branches.front().attempts, ratio));
  }
  const double t = seconds_since(t0);
  v.check(t < 60.0, fmt("%.1f s", t));
  return v;
}

// 8 ------------------------------------------------------------------------

Verdict competition_single_bifurcation() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  ProblemParams params;
  params.grid_n = 320;
  auto s = setup("competition", 0.01, params);
  s.config.p_end = 0.3 + 0.5 * s.config.h;  // "until alpha > 0.3"
  s.options.branch_depth = 0;
  const auto& sys = s.entry.system;
  const auto a = run_adaptive(sys, s.entry.start_u, s.entry.start_p, s.config, s.options);
  const auto& pts = a.branches.front().points;
  // An eigenvalue passing through zero flips det F_u. lambda_min alone can also change
  // sign when a different (already negative) eigenvalue becomes the smallest in |Re|.
  int flips = 0;
  bool lambda_agrees = true;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].det_sign == pts[i - 1].det_sign) continue;
    ++flips;
    lambda_agrees = lambda_agrees && std::signbit(pts[i].lambda_min) != std::signbit(pts[i - 1].lambda_min);
  }
  bool diagonal = true;
  for (const auto& p : pts) diagonal = diagonal && std::abs(p.u(0) - p.p) < 1e-6;
  v.check(flips == 1 && lambda_agrees && diagonal, fmt("%d zero crossing(s) on the diagonal", flips));
  double off = 0.0;
  for (const auto& b : a.bifurcations)
    for (const auto& d : b.directions) off = std::max(off, std::abs(d.delta_u(0) - d.delta_p));
  v.check(a.bifurcations.size() == 1 && off > 1e-2, fmt("non-diagonal direction |dbeta-dalpha|=%.3f", off));
  // Cost of the same alpha sweep; the traditional path may drift off the diagonal at
  // the bifurcation (it has no branch-keeping logic), which is reported, not hidden.
  const auto b = run_baseline(sys, s.entry.start_u, s.entry.start_p, s.config);
  const auto& bpts = b.branches.front().points;
  double left_at = std::nan("");
  for (const auto& p : bpts)
    if (std::abs(p.u(0) - p.p) > 1e-3) {
      left_at = p.p;
      break;
    }
  const double ratio =
      static_cast<double>(a.branches.front().attempts) / static_cast<double>(b.branches.front().attempts);
  v.check(ratio <= 0.5, fmt("%zu/%zu=%.2f (d=%.2f, traditional end alpha=%.3f, left diagonal at %.4f)",
                            a.branches.front().attempts, b.branches.front().attempts, ratio, params.d,
                            bpts.back().p, left_at));
  const double t = seconds_since(t0);
  v.check(t < 120.0, fmt("%.1f s", t));
  return v;
}

// 9 ------------------------------------------------------------------------

ParametricSystem linear_system(const DenseMatrix& A, const Vector& b) {
  ParametricSystem sys;
  sys.name = "linear";
  sys.dimension = static_cast<std::size_t>(A.rows());
  sys.evaluator = [A, b](const Vector& u, double p) -> Vector { return A * u + b * p; };
  sys.analytic_jacobian_u = [A](const Vector&, double) { return A; };
  sys.analytic_jacobian_p = [b](const Vector&, double) { return b; };
  return sys;
}

DenseMatrix random_matrix(std::mt19937_64& rng, int n, int m) {
  std::normal_distribution<double> N01;
  DenseMatrix A(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) A(i, j) = N01(rng);
  return A;
}

bool augmented_rank(std::string& why) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> dim(1, 12);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = dim(rng);
    const DenseMatrix A = random_matrix(rng, n, n) + 3.0 * DenseMatrix::Identity(n, n);
    const Vector b = random_matrix(rng, n, 1);
    const auto sys = linear_system(A, b);
    StepState st;
    st.point.u = random_matrix(rng, n, 1);
    st.point.p = unit(rng);
    Vector v = random_matrix(rng, n, 1);
    st.v = v.normalized();
    st.s = unit(rng);
    st.g = unit(rng);
    const DenseMatrix J = augmented_jacobian(sys, st, st.point.u, st.point.p);
    Eigen::JacobiSVD<DenseMatrix> svd(J);
    const auto& sv = svd.singularValues();
    if (!(sv(sv.size() - 1) > 1e-10 * sv(0))) {
      why = fmt("trial %d sigma ratio %.1e", trial, sv(sv.size() - 1) / sv(0));
      return false;
    }
  }
  return true;
}

bool step_direction(std::string& why) {
  for (const auto& name : problem_names()) {
    ProblemParams params;
    if (name == "pde1d") params.grid_n = 60;
    if (name == "competition") params.grid_n = 40;
    auto s = setup(name, 0.0, params);
    s.config.h = registry_entry(name, params).default_h;
    s.config.p_end = default_p_end(s.entry, s.config.h);
    const auto& sys = s.entry.system;
    const PathPoint start = annotate_point(sys, s.entry.start_u, s.entry.start_p, s.config);
    GenericCalibration cal;
    try {
      cal = calibrate(sys, start, s.config);
    } catch (const NumericalError&) {
      continue;  // singular start: nothing generic to step from
    }
    AdaptiveTracker tracker(sys, s.config, cal);
    const auto result = tracker.track(start);
    AdaptiveTracker probe(sys, s.config, cal);
    for (std::size_t i = 1; i < result.points.size(); ++i) {
      const auto st = probe.state_at(result.points[i - 1]);
      if (st.s <= 0.0) continue;
      const double dp = result.points[i].p - result.points[i - 1].p;
      if (!(dp * s.config.h > 0.0)) {
        why = fmt("%s step %zu dp=%.2e h=%.2e", name.c_str(), i, dp, s.config.h);
        return false;
      }
    }
  }
  return true;
}

bool inflation_properties(std::string& why) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> dim(2, 20);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = dim(rng);
    DenseMatrix J = random_matrix(rng, n, n);
    if (trial % 2 == 0) J.col(n - 1) = J.col(0);  // exactly singular half the time
    const Vector F = random_matrix(rng, n, 1);
    const auto inf = assemble_inflated(J, F);
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(inf.matrix);
    const double scale = inf.matrix.norm();
    if (es.eigenvalues().minCoeff() < -1e-10 * scale) {
      why = fmt("PSD trial %d min eig %.2e", trial, es.eigenvalues().minCoeff());
      return false;
    }
    const auto upd = solve_inflated(inf, 1e-12, 2000);
    Vector raw(n + 1);
    raw << upd.delta_u_tilde, upd.alpha;
    Vector shift(n + 1);
    shift << inf.v, -1.0;
    const auto moved = split_inflated(inf, raw + 0.7 * shift);
    if ((moved.delta_u - upd.delta_u).norm() > 1e-9 * std::max(1.0, upd.delta_u.norm())) {
      why = fmt("kernel shift trial %d", trial);
      return false;
    }
    if (trial % 2 == 1) {
      const Vector newton = -J.fullPivLu().solve(F);
      const double rel = (upd.delta_u - newton).norm() / newton.norm();
      Eigen::JacobiSVD<DenseMatrix> svd(J);
      const double cond = svd.singularValues()(0) / svd.singularValues()(n - 1);
      if (cond < 1e4 && rel > 1e-6) {
        why = fmt("newton agreement trial %d rel %.1e", trial, rel);
        return false;
      }
    }
  }
  return true;
}

bool jacobians_match(std::string& why) {
  for (const auto& name : problem_names()) {
    ProblemParams params;
    if (name == "pde1d") params.grid_n = 40;
    if (name == "competition") params.grid_n = 30;
    const auto e = registry_entry(name, params);
    const double spread = (name == "pde1d" || name == "competition") ? 0.05 : 0.5;
    const double tol = (name == "pde1d" || name == "competition") ? 1e-4 : 1e-5;
    const auto check = validate_jacobians(e.system, e.start_u, e.start_p, spread, 10, 7);
    if (check.max_relative_error_u > tol || check.max_relative_error_p > tol) {
      why = fmt("%s rel %.1e/%.1e", name.c_str(), check.max_relative_error_u, check.max_relative_error_p);
      return false;
    }
  }
  return true;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// report.json minus timing fields, which are the only non-deterministic output.
std::string stable_report(const fs::path& p) {
  auto j = Json::parse(slurp(p));
  j.erase("wall_seconds");
  for (auto& b : j["branches"]) b.erase("wall_seconds");
  return j.dump();
}

bool cli_deterministic(std::string& why) {
  const fs::path root = fs::temp_directory_path() / ("homotrack-acceptance-" + std::to_string(::getpid()));
  const std::string cli = HOMOTRACK_CLI_PATH;
  const std::vector<std::string> runs{
      "track --problem ex11 --h -0.2 --seed 3",
      "track --problem ilex --seed 3",
      "track --problem ex21 --start 1,1 --h -0.1 --branch-depth 1 --seed 3",
      "track --problem ex22 --seed 3 --full-state",
      "track --problem ex23 --seed 3",
      "track --problem ex23 --tracker traditional --seed 3",
      "track --problem pde1d --grid-n 80 --seed 3",
      "track --problem competition --grid-n 40 --seed 3",
      "compare --problem ex23 --seed 3",
      "compare --problem ex11 --h -0.2 --seed 3",
  };
  bool ok = true;
  for (std::size_t i = 0; i < runs.size() && ok; ++i) {
    std::string out[2];
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path dir = root / (std::to_string(i) + "-" + std::to_string(rep));
      fs::create_directories(dir);
      const std::string cmd =
          cli + " " + runs[i] + " --out-dir " + dir.string() + " > " + (dir / "stdout.txt").string() + " 2>&1";
      const int rc = std::system(cmd.c_str());
      if (rc != 0) {
        why = "exit " + std::to_string(rc) + ": " + runs[i];
        ok = false;
        break;
      }
      std::vector<fs::path> files;
      for (const auto& f : fs::directory_iterator(dir))
        if (f.path().extension() == ".csv" || f.path().extension() == ".json") files.push_back(f.path());
      std::sort(files.begin(), files.end());
      for (const auto& f : files)
        out[rep] += f.filename().string() + "\n" +
                    (f.extension() == ".json" ? stable_report(f) : slurp(f));
    }
    if (ok && (out[0] != out[1] || out[0].empty())) {
      why = "differs: " + runs[i];
      ok = false;
    }
  }
  if (ok) {
    const std::string cmd = cli + " gs-table";
    std::string text[2];
    for (auto& t : text) {
      FILE* pipe = popen(cmd.c_str(), "r");
      char buf[256];
      while (pipe && std::fgets(buf, sizeof buf, pipe)) t += buf;
      if (pipe) pclose(pipe);
    }
    if (text[0] != text[1] || text[0].empty()) {
      why = "gs-table differs";
      ok = false;
    }
  }
  std::error_code ec;
  fs::remove_all(root, ec);
  return ok;
}

Verdict property_suites() {
  Verdict v;
  const std::vector<std::pair<std::string, std::function<bool(std::string&)>>> suites{
      {"augmented rank", augmented_rank},
      {"step direction", step_direction},
      {"inflation psd/kernel/newton", inflation_properties},
      {"jacobian vs fd", jacobians_match},
      {"cli determinism", cli_deterministic},
  };
  for (const auto& [name, fn] : suites) {
    std::string why;
    bool ok = false;
    try {
      ok = fn(why);
    } catch (const std::exception& e) {
      why = e.what();
    }
    v.check(ok, why.empty() ? name : name + " (" + why + ")");
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, Verdict (*)()>> criteria{
      {"gauss-seidel table", gauss_seidel_table_exact},
      {"ilex endgame", ilex_endgame},
      {"ex11 turning point", ex11_turning_point},
      {"ex21 tangent cone", ex21_tangent_cone},
      {"ex22 circles", ex22_circles},
      {"ex23 unfolding", ex23_unfolding},
      {"pde1d branches", pde1d_branches_ratio},
      {"competition", competition_single_bifurcation},
      {"property suites", property_suites},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v.check(false, std::string("threw: ") + e.what());
    }
    std::printf("[%s] %d %-20s %s\n", v.pass ? "PASS" : "FAIL", id, criteria[k].first, v.detail.c_str());
    std::fflush(stdout);
    failures += v.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
