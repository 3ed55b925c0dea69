// homotrack: command-line front end.
//
//   homotrack list-problems
//   homotrack track   --problem ex11 --h -0.2 --out-dir out
//   homotrack compare --problem ex23
//   homotrack gs-table
//
// Exit codes: 0 success, 1 usage, 2 numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "homotrack/errors.hpp"
#include "homotrack/pipeline.hpp"
#include "homotrack/report.hpp"

namespace {

using namespace homotrack;

constexpr int kUsage = 1;
constexpr int kNumerical = 2;

struct RunFlags {
  std::string problem;
  std::string start;
  std::optional<double> p0;
  std::optional<double> p_end;
  std::optional<double> h;
  std::string tracker = "adaptive";
  std::optional<std::size_t> branch_depth;
  std::optional<std::size_t> stop_after_folds;
  std::uint64_t seed = 0;
  std::string out_dir;
  bool full_state = false;
  std::size_t grid_n = 0;
  std::optional<double> d;
  std::optional<std::size_t> branch;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--problem", f.problem, "registered problem (see list-problems)")->required();
  cmd->add_option("--start", f.start, "start state, comma-separated floats (append p to set the start parameter)");
  cmd->add_option("--p0", f.p0, "start parameter");
  cmd->add_option("--pend", f.p_end, "end parameter");
  cmd->add_option("--h", f.h, "signed step size");
  cmd->add_option("--tracker", f.tracker, "adaptive or traditional")->check(CLI::IsMember({"adaptive", "traditional"}));
  cmd->add_option("--branch-depth", f.branch_depth, "branch points below this depth spawn new branches");
  cmd->add_option("--stop-after-folds", f.stop_after_folds, "end a branch after passing this many folds");
  cmd->add_option("--seed", f.seed, "seed for the calibration draw and the endgame projection");
  cmd->add_option("--out-dir", f.out_dir, "directory for report.json and path CSVs");
  cmd->add_flag("--full-state", f.full_state, "write every state component to the path CSVs");
  cmd->add_option("--grid-n", f.grid_n, "grid points (pde1d, competition)");
  cmd->add_option("--d", f.d, "dispersal rate (competition)");
  cmd->add_option("--branch", f.branch, "start branch at p=18 (pde1d; 1 is the trivial solution)");
}

Vector parse_start(const std::string& text) {
  std::vector<double> xs;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      xs.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("--start: not a number: '" + item + "'");
    }
  }
  Vector v(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) v(static_cast<Eigen::Index>(i)) = xs[i];
  return v;
}

struct Setup {
  RegistryEntry entry;
  Vector u0;
  double p0 = 0.0;
  TrackerConfig config;
  PipelineOptions options;
};

Setup make_setup(const RunFlags& f) {
  ProblemParams params;
  params.grid_n = f.grid_n;
  if (f.d) params.d = *f.d;
  if (f.branch) params.branch = *f.branch;
  Setup s{registry_entry(f.problem, params), {}, 0.0, {}, {}};
  s.u0 = f.start.empty() ? s.entry.start_u : parse_start(f.start);
  s.p0 = f.p0.value_or(s.entry.start_p);
  const auto n = s.entry.system.dimension;
  // One extra component is the start parameter: --start x,p.
  if (static_cast<std::size_t>(s.u0.size()) == n + 1 && !f.p0) {
    s.p0 = s.u0(static_cast<Eigen::Index>(n));
    s.u0.conservativeResize(static_cast<Eigen::Index>(n));
  }
  if (static_cast<std::size_t>(s.u0.size()) != n) {
    throw UsageError("--start has " + std::to_string(s.u0.size()) + " components; " + f.problem + " needs " +
                     std::to_string(n) + " (or " + std::to_string(n + 1) + " with p last)");
  }
  s.config.h = f.h.value_or(s.entry.default_h);
  if (s.config.h == 0.0) throw UsageError("--h must be nonzero");
  s.config.p_end = f.p_end.value_or(default_p_end(s.entry, s.config.h));
  s.config.newton_tol = s.entry.newton_tol;
  s.config.rng_seed = f.seed;
  s.options.branch_depth = f.branch_depth.value_or(s.entry.branch_depth);
  s.options.stop_after_folds = f.stop_after_folds.value_or(s.entry.stop_after_folds);
  const double lo = std::min({s.entry.p_min, s.p0, s.config.p_end});
  const double hi = std::max({s.entry.p_max, s.p0, s.config.p_end});
  s.options.window = std::pair{lo, hi};
  return s;
}

void print_summary(const RunReport& r) {
  std::printf("%s (%s): %zu branch(es), %zu singular point(s), %.3f s\n", r.problem.c_str(), r.tracker.c_str(),
              r.branches.size(), r.bifurcations.size(), r.wall_seconds);
  for (const auto& b : r.branches) {
    const auto& last = b.points.back();
    std::printf("  branch %zu  depth %zu  steps %zu  attempts %zu  end p=%.6g |u|=%.6g  %s\n", b.id, b.depth,
                b.steps(), b.attempts, last.p, last.u.norm(), b.stop_reason.c_str());
  }
  for (const auto& b : r.bifurcations) {
    std::printf("  singular point on branch %zu: p=%.10g u0=%.10g  %s  c1=%d  rounds=%zu%s\n", b.branch_id,
                b.record.p_b, b.record.u_b.size() ? b.record.u_b(0) : 0.0, b.cone.c_str(), b.record.c1,
                b.record.rounds, b.record.converged ? "" : "  (not converged)");
  }
  for (const auto& n : r.notes) std::printf("  note: %s\n", n.c_str());
}

int cmd_track(const RunFlags& f) {
  const Setup s = make_setup(f);
  const RunReport report = f.tracker == "traditional" ? run_baseline(s.entry.system, s.u0, s.p0, s.config)
                                                      : run_adaptive(s.entry.system, s.u0, s.p0, s.config, s.options);
  print_summary(report);
  if (!f.out_dir.empty()) {
    for (const auto& file : write_report(report, f.out_dir, f.full_state)) std::printf("wrote %s\n", file.c_str());
  }
  return report.failed ? kNumerical : 0;
}

int cmd_compare(const RunFlags& f) {
  const Setup s = make_setup(f);
  CompareOptions opt;
  opt.pipeline = s.options;
  const auto rows = compare_trackers(s.entry.system, s.u0, s.p0, s.config, opt);
  std::fputs(compare_text(rows).c_str(), stdout);
  if (!f.out_dir.empty()) {
    std::filesystem::create_directories(f.out_dir);
    const auto file = std::filesystem::path(f.out_dir) / "compare.csv";
    std::ofstream(file, std::ios::binary) << compare_csv(rows);
    std::printf("wrote %s\n", file.c_str());
  }
  return 0;
}

int cmd_gs_table() {
  std::printf("%-8s %s\n", "epsilon", "iterations");
  for (const auto& row : gauss_seidel_table()) {
    std::printf("%-8g %zu%s\n", row.epsilon, row.iterations, row.converged ? "" : " (cap reached)");
  }
  return 0;
}

int cmd_list_problems() {
  for (const auto& name : problem_names()) {
    std::printf("%-12s %s\n", name.c_str(), problem_description(name).c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Homotopy tracking with bifurcation detection"};
  app.set_help_flag("--help", "print help and exit");  // -h would clash with --h
  app.require_subcommand(1);
  RunFlags track_flags;
  RunFlags compare_flags;
  auto* track = app.add_subcommand("track", "track from a start point and write the run report");
  add_run_flags(track, track_flags);
  auto* compare = app.add_subcommand("compare", "adaptive vs traditional tracking, route by route");
  add_run_flags(compare, compare_flags);
  compare->get_option("--tracker")->description("ignored: both trackers run");
  auto* gs = app.add_subcommand("gs-table", "Gauss-Seidel iteration counts on the near-singular 3x3 example");
  auto* list = app.add_subcommand("list-problems", "registered problems");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (track->parsed()) return cmd_track(track_flags);
    if (compare->parsed()) return cmd_compare(compare_flags);
    if (gs->parsed()) return cmd_gs_table();
    if (list->parsed()) return cmd_list_problems();
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    if (e.kind() == ErrorKind::UnknownProblem || e.kind() == ErrorKind::InvalidConfig ||
        e.kind() == ErrorKind::DimensionMismatch)
      return kUsage;
    return kNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  }
  return kUsage;
}
