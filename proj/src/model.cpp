#include "homotrack/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "homotrack/kernels.hpp"
#include "homotrack/pde.hpp"

namespace homotrack {

namespace {

void check_dim(const ParametricSystem& sys, const Vector& u) {
  if (static_cast<std::size_t>(u.size()) != sys.dimension) {
    throw NumericalError(ErrorKind::DimensionMismatch, sys.name + ": expected " + std::to_string(sys.dimension) +
                                                           " unknowns, got " + std::to_string(u.size()));
  }
}

}  // namespace

Vector ParametricSystem::evaluate(const Vector& u, double p) const {
  check_dim(*this, u);
  Vector F = evaluator(u, p);
  if (static_cast<std::size_t>(F.size()) != dimension) {
    throw NumericalError(ErrorKind::DimensionMismatch, name + ": evaluator returned wrong length");
  }
  return F;
}

DenseMatrix ParametricSystem::jacobian_u(const Vector& u, double p) const {
  check_dim(*this, u);
  if (analytic_jacobian_u) return analytic_jacobian_u(u, p);
  return fd_jacobian_u(*this, u, p);
}

Vector ParametricSystem::jacobian_p(const Vector& u, double p) const {
  check_dim(*this, u);
  if (analytic_jacobian_p) return analytic_jacobian_p(u, p);
  return fd_jacobian_p(*this, u, p);
}

DenseMatrix ParametricSystem::jacobian_full(const Vector& u, double p) const {
  DenseMatrix A(static_cast<Eigen::Index>(dimension), static_cast<Eigen::Index>(dimension) + 1);
  A.leftCols(static_cast<Eigen::Index>(dimension)) = jacobian_u(u, p);
  A.col(static_cast<Eigen::Index>(dimension)) = jacobian_p(u, p);
  return A;
}

DenseMatrix fd_jacobian_u(const ParametricSystem& sys, const Vector& u, double p, double scale) {
  check_dim(sys, u);
  const auto exec = sys.dimension >= 64 ? kernels::Exec::Parallel : kernels::Exec::Serial;
  return kernels::fd_jacobian(sys.evaluator, u, p, scale, exec);
}

Vector fd_jacobian_p(const ParametricSystem& sys, const Vector& u, double p, double scale) {
  check_dim(sys, u);
  const double step = scale * std::max(1.0, std::abs(p));
  const double hi = p + step;
  const double lo = p - step;
  return (sys.evaluator(u, hi) - sys.evaluator(u, lo)) / (hi - lo);
}

JacobianCheck validate_jacobians(const ParametricSystem& sys, const Vector& center, double p_center, double spread,
                                 std::size_t probes, unsigned seed) {
  check_dim(sys, center);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  JacobianCheck check;
  check.probes = probes;
  for (std::size_t k = 0; k < probes; ++k) {
    Vector u = center;
    for (Eigen::Index i = 0; i < u.size(); ++i) u(i) += spread * unit(rng);
    const double p = p_center + spread * unit(rng);
    const DenseMatrix Ja = sys.jacobian_u(u, p);
    const DenseMatrix Jf = fd_jacobian_u(sys, u, p);
    const Vector pa = sys.jacobian_p(u, p);
    const Vector pf = fd_jacobian_p(sys, u, p);
    const double su = std::max(1.0, matrix_norm_inf(Ja));
    const double sp = std::max(1.0, max_norm(pa));
    check.max_relative_error_u = std::max(check.max_relative_error_u, matrix_norm_inf(Ja - Jf) / su);
    check.max_relative_error_p = std::max(check.max_relative_error_p, max_norm(pa - pf) / sp);
  }
  return check;
}

namespace {

ParametricSystem ex11() {
  ParametricSystem s;
  s.name = "ex11";
  s.dimension = 2;
  s.evaluator = [](const Vector& u, double p) {
    Vector F(2);
    F << u(0) * u(0) - p, u(0) * u(0) - 2.0 * u(1) * u(1) + p;
    return F;
  };
  s.analytic_jacobian_u = [](const Vector& u, double) {
    DenseMatrix J(2, 2);
    J << 2.0 * u(0), 0.0, 2.0 * u(0), -4.0 * u(1);
    return J;
  };
  s.analytic_jacobian_p = [](const Vector&, double) {
    Vector Fp(2);
    Fp << -1.0, 1.0;
    return Fp;
  };
  return s;
}

ParametricSystem ilex() {
  ParametricSystem s;
  s.name = "ilex";
  s.dimension = 2;
  s.evaluator = [](const Vector& u, double p) {
    const double w = u(0) + u(1);
    Vector F(2);
    F << u(0) * u(0) - p * p, w * w - p * p * p;
    return F;
  };
  s.analytic_jacobian_u = [](const Vector& u, double) {
    const double w = 2.0 * (u(0) + u(1));
    DenseMatrix J(2, 2);
    J << 2.0 * u(0), 0.0, w, w;
    return J;
  };
  s.analytic_jacobian_p = [](const Vector&, double p) {
    Vector Fp(2);
    Fp << -2.0 * p, -3.0 * p * p;
    return Fp;
  };
  return s;
}

ParametricSystem scalar(const std::string& name, double (*f)(double, double), double (*fx)(double, double),
                        double (*fp)(double, double)) {
  ParametricSystem s;
  s.name = name;
  s.dimension = 1;
  s.evaluator = [f](const Vector& u, double p) { return Vector::Constant(1, f(u(0), p)); };
  s.analytic_jacobian_u = [fx](const Vector& u, double p) { return DenseMatrix::Constant(1, 1, fx(u(0), p)); };
  s.analytic_jacobian_p = [fp](const Vector& u, double p) { return Vector::Constant(1, fp(u(0), p)); };
  return s;
}

// (x-p)^4 + (x-p)(x+p)
ParametricSystem ex21() {
  return scalar(
      "ex21", [](double x, double p) { const double a = x - p; return a * a * a * a + a * (x + p); },
      [](double x, double p) { const double a = x - p; return 4.0 * a * a * a + 2.0 * x; },
      [](double x, double p) { const double a = x - p; return -4.0 * a * a * a - 2.0 * p; });
}

// (x^2 + p^2 - 1)((x-1)^2 + p^2 - 1)
ParametricSystem ex22() {
  return scalar(
      "ex22",
      [](double x, double p) { return (x * x + p * p - 1.0) * ((x - 1.0) * (x - 1.0) + p * p - 1.0); },
      [](double x, double p) {
        const double c1 = x * x + p * p - 1.0;
        const double c2 = (x - 1.0) * (x - 1.0) + p * p - 1.0;
        return 2.0 * x * c2 + 2.0 * (x - 1.0) * c1;
      },
      [](double x, double p) {
        const double c1 = x * x + p * p - 1.0;
        const double c2 = (x - 1.0) * (x - 1.0) + p * p - 1.0;
        return 2.0 * p * (c1 + c2);
      });
}

// a^2 + (1/3 - 2b + b^3) a with a = x - p, b = x + p
ParametricSystem ex23() {
  return scalar(
      "ex23",
      [](double x, double p) {
        const double a = x - p, b = x + p;
        return a * a + (1.0 / 3.0 - 2.0 * b + b * b * b) * a;
      },
      [](double x, double p) {
        const double a = x - p, b = x + p;
        const double q = 1.0 / 3.0 - 2.0 * b + b * b * b;
        return 2.0 * a + q + (3.0 * b * b - 2.0) * a;
      },
      [](double x, double p) {
        const double a = x - p, b = x + p;
        const double q = 1.0 / 3.0 - 2.0 * b + b * b * b;
        return -2.0 * a - q + (3.0 * b * b - 2.0) * a;
      });
}

constexpr std::size_t kPdeDefaultN = 360;
constexpr std::size_t kCompetitionDefaultN = 320;

}  // namespace

const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names{"ex11", "ilex", "ex21", "ex22", "ex23", "pde1d", "competition"};
  return names;
}

ParametricSystem builtin(const std::string& name, const ProblemParams& params) {
  if (name == "ex11") return ex11();
  if (name == "ilex") return ilex();
  if (name == "ex21") return ex21();
  if (name == "ex22") return ex22();
  if (name == "ex23") return ex23();
  if (name == "pde1d") return build_pde1d(params.grid_n ? params.grid_n : kPdeDefaultN);
  if (name == "competition") return build_competition(params.grid_n ? params.grid_n : kCompetitionDefaultN, params.d);
  std::string known;
  for (const auto& n : problem_names()) known += (known.empty() ? "" : ", ") + n;
  throw NumericalError(ErrorKind::UnknownProblem, "'" + name + "' (known: " + known + ")");
}

const std::string& problem_description(const std::string& name) {
  static const std::map<std::string, std::string> descriptions{
      {"ex11", "x^2 - p, x^2 - 2y^2 + p; fold/branch point at the origin"},
      {"ilex", "x^2 - p^2, (x+y)^2 - p^3; fractional-power branch into the origin"},
      {"ex21", "(x-p)^4 + (x-p)(x+p); transcritical-like crossing at the origin"},
      {"ex22", "two unit circles centred at x=0 and x=1; crossings at p = +-sqrt(3)/2"},
      {"ex23", "(x-p)^2 + (1/3 - 2(x+p) + (x+p)^3)(x-p); diagonal plus a folded curve"},
      {"pde1d", "u_xx = u^2(u^2 - p), u_x(0) = 0, u(1) = 0; finite differences"},
      {"competition", "resident/invader competition with directed movement, m(x) = 1 + x"},
  };
  const auto it = descriptions.find(name);
  if (it == descriptions.end()) (void)builtin(name);  // throws UnknownProblem with the registry list
  return it->second;
}

RegistryEntry registry_entry(const std::string& name, const ProblemParams& params) {
  RegistryEntry e;
  e.name = name;
  e.system = builtin(name, params);
  e.description = problem_description(name);
  auto vec = [](std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
  };
  if (name == "ex11") {
    e.start_u = vec({-1.0, 1.0});
    e.start_p = 1.0;
    e.p_min = -0.5;
    e.p_max = 1.0;
    e.default_h = -0.2;
  } else if (name == "ilex") {
    e.start_u = vec({-1.0, 2.0});
    e.start_p = 1.0;
    e.p_min = -0.5;
    e.p_max = 1.0;
    e.default_h = -0.1;
  } else if (name == "ex21") {
    e.start_u = vec({1.0});
    e.start_p = 1.0;
    e.p_min = -1.0;
    e.p_max = 1.0;
    e.default_h = -0.1;
  } else if (name == "ex22") {
    e.start_u = vec({0.5});
    e.start_p = std::sqrt(3.0) / 2.0;
    e.p_min = -1.0;
    e.p_max = 1.0;
    e.default_h = 0.1;
    e.stop_after_folds = 1;  // the route ends once it has passed |p| = 1
  } else if (name == "ex23") {
    e.start_u = vec({1.0});
    e.start_p = 1.0;
    e.p_min = -0.03;
    e.p_max = 1.0;
    e.default_h = -0.05;
    e.branch_depth = 2;  // the folded curve meets the diagonal twice
  } else if (name == "pde1d") {
    const std::size_t N = params.grid_n ? params.grid_n : kPdeDefaultN;
    const auto branches = pde1d_branches(N, 18.0);
    if (params.branch < 1 || params.branch > branches.size()) {
      throw NumericalError(ErrorKind::InvalidConfig, "pde1d has " + std::to_string(branches.size()) +
                                                         " branches at p=18; requested " +
                                                         std::to_string(params.branch));
    }
    e.start_u = branches[params.branch - 1];
    e.start_p = 18.0;
    e.p_min = 0.0;
    e.p_max = 18.0;
    e.default_h = -0.4;
    e.newton_tol = 1e-8;
  } else if (name == "competition") {
    const std::size_t N = params.grid_n ? params.grid_n : kCompetitionDefaultN;
    e.start_u = initial_resident(0.01, params.d, N).pack();
    e.start_p = 0.01;
    e.p_min = 0.01;
    // The diagonal crossing sits near alpha = 0.67 d; keep it inside the window.
    e.p_max = std::max(0.3, 0.8 * params.d);
    e.default_h = 0.01;
    e.newton_tol = 1e-8;
  }
  return e;
}

double default_p_end(const RegistryEntry& entry, double h) { return h < 0 ? entry.p_min : entry.p_max; }

}  // namespace homotrack
