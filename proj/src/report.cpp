#include "homotrack/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "homotrack/errors.hpp"

namespace homotrack {

NLOHMANN_JSON_SERIALIZE_ENUM(BifurcationKind, {{BifurcationKind::BranchPoint, "branch_point"},
                                               {BifurcationKind::Fold, "fold"},
                                               {BifurcationKind::Unclassified, "unclassified"}})
NLOHMANN_JSON_SERIALIZE_ENUM(EigenSide, {{EigenSide::Right, "right"}, {EigenSide::Left, "left"}})

namespace {

// Doubles go through JSON numbers when finite (nlohmann prints round-trip precision).
Json num(double x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

double get_num(const Json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  throw NumericalError(ErrorKind::InvalidConfig, "not a number: " + s);
}

Json vec(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
  return a;
}

Vector get_vec(const Json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = get_num(j[i]);
  return v;
}

Json point_json(const PathPoint& p) {
  return {{"u", vec(p.u)},           {"p", num(p.p)},         {"lambda_min", num(p.lambda_min)},
          {"residual", num(p.residual)}, {"index", p.index}, {"det_sign", p.det_sign}};
}

PathPoint get_point(const Json& j) {
  PathPoint p;
  p.u = get_vec(j.at("u"));
  p.p = get_num(j.at("p"));
  p.lambda_min = get_num(j.at("lambda_min"));
  p.residual = get_num(j.at("residual"));
  p.index = j.at("index").get<std::size_t>();
  p.det_sign = j.at("det_sign").get<int>();
  return p;
}

Json config_json(const TrackerConfig& c) {
  return {{"h", num(c.h)},
          {"p_end", num(c.p_end)},
          {"newton_tol", num(c.newton_tol)},
          {"newton_cap", c.newton_cap},
          {"pse_zone", num(c.pse_zone)},
          {"ill_cond_lambda", num(c.ill_cond_lambda)},
          {"max_steps", c.max_steps},
          {"winding_max", c.winding_max},
          {"k1", num(c.k1)},
          {"k2", num(c.k2)},
          {"rng_seed", c.rng_seed},
          {"eigen", {{"dense_limit", c.eigen.dense_limit}, {"side", c.eigen.side}, {"krylov_dim", c.eigen.krylov_dim}}},
          {"null_cutoff", num(c.null_cutoff)},
          {"calibration_floor", num(c.calibration_floor)},
          {"calibration_draws", c.calibration_draws},
          {"inflation_tol", num(c.inflation_tol)},
          {"inflation_cap", c.inflation_cap},
          {"inflation_newton_cap", c.inflation_newton_cap},
          {"pse_samples", c.pse_samples},
          {"pse_rounds", c.pse_rounds},
          {"pse_tol", num(c.pse_tol)},
          {"grow_after", c.grow_after},
          {"min_h", num(c.min_h)},
          {"corrector_cap", c.corrector_cap}};
}

TrackerConfig get_config(const Json& j) {
  TrackerConfig c;
  c.h = get_num(j.at("h"));
  c.p_end = get_num(j.at("p_end"));
  c.newton_tol = get_num(j.at("newton_tol"));
  j.at("newton_cap").get_to(c.newton_cap);
  c.pse_zone = get_num(j.at("pse_zone"));
  c.ill_cond_lambda = get_num(j.at("ill_cond_lambda"));
  j.at("max_steps").get_to(c.max_steps);
  j.at("winding_max").get_to(c.winding_max);
  c.k1 = get_num(j.at("k1"));
  c.k2 = get_num(j.at("k2"));
  j.at("rng_seed").get_to(c.rng_seed);
  const auto& e = j.at("eigen");
  e.at("dense_limit").get_to(c.eigen.dense_limit);
  e.at("side").get_to(c.eigen.side);
  e.at("krylov_dim").get_to(c.eigen.krylov_dim);
  c.null_cutoff = get_num(j.at("null_cutoff"));
  c.calibration_floor = get_num(j.at("calibration_floor"));
  j.at("calibration_draws").get_to(c.calibration_draws);
  c.inflation_tol = get_num(j.at("inflation_tol"));
  j.at("inflation_cap").get_to(c.inflation_cap);
  j.at("inflation_newton_cap").get_to(c.inflation_newton_cap);
  j.at("pse_samples").get_to(c.pse_samples);
  j.at("pse_rounds").get_to(c.pse_rounds);
  c.pse_tol = get_num(j.at("pse_tol"));
  j.at("grow_after").get_to(c.grow_after);
  c.min_h = get_num(j.at("min_h"));
  j.at("corrector_cap").get_to(c.corrector_cap);
  return c;
}

Json direction_json(const TangentDirection& d) {
  return {{"a", {num(d.a(0)), num(d.a(1))}}, {"delta_u", vec(d.delta_u)}, {"delta_p", num(d.delta_p)}};
}

TangentDirection get_direction(const Json& j) {
  TangentDirection d;
  d.a = Eigen::Vector2d(get_num(j.at("a")[0]), get_num(j.at("a")[1]));
  d.delta_u = get_vec(j.at("delta_u"));
  d.delta_p = get_num(j.at("delta_p"));
  return d;
}

Json bifurcation_json(const BifurcationEntry& b) {
  const auto& r = b.record;
  Json samples = Json::array();
  for (const auto& p : r.new_samples) samples.push_back(point_json(p));
  Json dirs = Json::array();
  for (const auto& d : b.directions) dirs.push_back(direction_json(d));
  return {{"u_b", vec(r.u_b)},
          {"p_b", num(r.p_b)},
          {"c1", r.c1},
          {"c2", r.c2},
          {"exponent_u", num(r.exponent_u)},
          {"exponent_p", num(r.exponent_p)},
          {"holdout_error", num(r.holdout_error)},
          {"samples_used", r.samples_used},
          {"rounds", r.rounds},
          {"converged", r.converged},
          {"residual", num(r.residual)},
          {"kind", r.kind},
          {"new_samples", samples},
          {"branch_id", b.branch_id},
          {"null_dim", b.null_dim},
          {"cone", b.cone},
          {"hessian", {num(b.hessian(0, 0)), num(b.hessian(0, 1)), num(b.hessian(1, 0)), num(b.hessian(1, 1))}},
          {"directions", dirs},
          {"seeds", b.seeds},
          {"point_index", b.point_index},
          {"attempts_before", b.attempts_before}};
}

BifurcationEntry get_bifurcation(const Json& j) {
  BifurcationEntry b;
  auto& r = b.record;
  r.u_b = get_vec(j.at("u_b"));
  r.p_b = get_num(j.at("p_b"));
  j.at("c1").get_to(r.c1);
  j.at("c2").get_to(r.c2);
  r.exponent_u = get_num(j.at("exponent_u"));
  r.exponent_p = get_num(j.at("exponent_p"));
  r.holdout_error = get_num(j.at("holdout_error"));
  j.at("samples_used").get_to(r.samples_used);
  j.at("rounds").get_to(r.rounds);
  j.at("converged").get_to(r.converged);
  r.residual = get_num(j.at("residual"));
  j.at("kind").get_to(r.kind);
  for (const auto& p : j.at("new_samples")) r.new_samples.push_back(get_point(p));
  j.at("branch_id").get_to(b.branch_id);
  j.at("null_dim").get_to(b.null_dim);
  j.at("cone").get_to(b.cone);
  const auto& H = j.at("hessian");
  b.hessian << get_num(H[0]), get_num(H[1]), get_num(H[2]), get_num(H[3]);
  for (const auto& d : j.at("directions")) b.directions.push_back(get_direction(d));
  j.at("seeds").get_to(b.seeds);
  j.at("point_index").get_to(b.point_index);
  j.at("attempts_before").get_to(b.attempts_before);
  return b;
}

Json branch_json(const BranchRecord& b) {
  Json pts = Json::array();
  for (const auto& p : b.points) pts.push_back(point_json(p));
  Json parent = b.parent_bifurcation ? Json(*b.parent_bifurcation) : Json(nullptr);
  return {{"id", b.id},
          {"depth", b.depth},
          {"parent_bifurcation", parent},
          {"h", num(b.h)},
          {"steps", b.steps()},
          {"attempts", b.attempts},
          {"attempts_at", b.attempts_at},
          {"wall_seconds", num(b.wall_seconds)},
          {"stop_reason", b.stop_reason},
          {"points", pts}};
}

BranchRecord get_branch(const Json& j) {
  BranchRecord b;
  j.at("id").get_to(b.id);
  j.at("depth").get_to(b.depth);
  if (!j.at("parent_bifurcation").is_null()) b.parent_bifurcation = j.at("parent_bifurcation").get<std::size_t>();
  b.h = get_num(j.at("h"));
  j.at("attempts").get_to(b.attempts);
  j.at("attempts_at").get_to(b.attempts_at);
  b.wall_seconds = get_num(j.at("wall_seconds"));
  j.at("stop_reason").get_to(b.stop_reason);
  for (const auto& p : j.at("points")) b.points.push_back(get_point(p));
  if (j.at("steps").get<std::size_t>() != b.steps()) {
    throw NumericalError(ErrorKind::InvalidConfig, "branch step count does not match its points");
  }
  return b;
}

}  // namespace

Json to_json(const RunReport& report) {
  Json branches = Json::array();
  for (const auto& b : report.branches) branches.push_back(branch_json(b));
  Json bifs = Json::array();
  for (const auto& b : report.bifurcations) bifs.push_back(bifurcation_json(b));
  return {{"problem", report.problem},     {"tracker", report.tracker},
          {"config", config_json(report.config)}, {"branches", branches},
          {"bifurcations", bifs},          {"notes", report.notes},
          {"wall_seconds", num(report.wall_seconds)}, {"failed", report.failed}};
}

RunReport report_from_json(const Json& j) {
  try {
    RunReport r;
    j.at("problem").get_to(r.problem);
    j.at("tracker").get_to(r.tracker);
    r.config = get_config(j.at("config"));
    for (const auto& b : j.at("branches")) r.branches.push_back(get_branch(b));
    for (const auto& b : j.at("bifurcations")) r.bifurcations.push_back(get_bifurcation(b));
    j.at("notes").get_to(r.notes);
    r.wall_seconds = get_num(j.at("wall_seconds"));
    j.at("failed").get_to(r.failed);
    return r;
  } catch (const Json::exception& e) {
    throw NumericalError(ErrorKind::InvalidConfig, std::string("malformed report: ") + e.what());
  }
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string path_csv(const BranchRecord& branch, bool full_state) {
  std::ostringstream os;
  os << "index,p,lambda_min,residual,u_norm";
  const Eigen::Index n = branch.points.empty() ? 0 : branch.points.front().u.size();
  if (full_state)
    for (Eigen::Index i = 0; i < n; ++i) os << ",u_" << i;
  os << '\n';
  for (const auto& pt : branch.points) {
    os << pt.index << ',' << format_number(pt.p) << ',' << format_number(pt.lambda_min) << ','
       << format_number(pt.residual) << ',' << format_number(pt.u.norm());
    if (full_state)
      for (Eigen::Index i = 0; i < pt.u.size(); ++i) os << ',' << format_number(pt.u(i));
    os << '\n';
  }
  return os.str();
}

std::vector<std::filesystem::path> write_report(const RunReport& report, const std::filesystem::path& dir,
                                                bool full_state) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto put = [&](const std::filesystem::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw NumericalError(ErrorKind::InvalidConfig, "cannot write " + file.string());
    out << text;
    written.push_back(file);
  };
  put(dir / "report.json", to_json(report).dump(2) + "\n");
  for (const auto& b : report.branches) put(dir / ("path-" + std::to_string(b.id) + ".csv"), path_csv(b, full_state));
  return written;
}

std::string compare_csv(const std::vector<CompareRow>& rows) {
  std::ostringstream os;
  os << "route,tracker,steps,prefix_steps,attempts,bifurcation_u0,bifurcation_p,end_u0,end_p,status\n";
  for (const auto& r : rows) {
    const double bu = r.bifurcations.empty() ? std::nan("") : r.bifurcations.back().first;
    const double bp = r.bifurcations.empty() ? std::nan("") : r.bifurcations.back().second;
    std::string status = r.status;
    for (char& c : status)
      if (c == ',' || c == '\n') c = ';';
    os << r.route << ',' << r.tracker << ',' << r.steps << ',' << r.prefix_steps << ',' << r.attempts << ','
       << format_number(bu) << ',' << format_number(bp) << ','
       << format_number(r.end_u0) << ',' << format_number(r.end_p) << ',' << status << '\n';
  }
  return os.str();
}

std::string compare_text(const std::vector<CompareRow>& rows) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-10s %-12s %7s %9s %9s %12s %12s %12s %12s  %s\n", "route", "tracker", "steps",
                "attempts", "time[s]", "bif u0", "bif p", "end u0", "end p", "status");
  os << line;
  for (const auto& r : rows) {
    const double bu = r.bifurcations.empty() ? std::nan("") : r.bifurcations.back().first;
    const double bp = r.bifurcations.empty() ? std::nan("") : r.bifurcations.back().second;
    std::snprintf(line, sizeof line, "%-10s %-12s %7zu %9zu %9.3f %12.6g %12.6g %12.6g %12.6g  %s\n",
                  r.route.c_str(), r.tracker.c_str(), r.steps, r.attempts, r.wall_seconds, bu, bp, r.end_u0, r.end_p,
                  r.status.c_str());
    os << line;
  }
  return os.str();
}

}  // namespace homotrack
