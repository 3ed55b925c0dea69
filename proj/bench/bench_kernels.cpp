// Serial reference vs OpenMP for the parallel kernels, on pde1d-sized inputs.
//
//   bench_kernels --benchmark_filter=fd_jacobian

#include <benchmark/benchmark.h>

#include "homotrack/kernels.hpp"
#include "homotrack/pde.hpp"

using namespace homotrack;
using kernels::Exec;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(1) ? Exec::Parallel : Exec::Serial; }

void label(benchmark::State& state) { state.SetLabel(state.range(1) ? "openmp" : "serial"); }

void fd_jacobian(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const auto sys = build_pde1d(N);
  const Vector u = Vector::LinSpaced(static_cast<Eigen::Index>(N - 1), 1.0, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::fd_jacobian(sys.evaluator, u, 18.0, 1e-6, exec_of(state)));
  label(state);
}

void multistart_newton(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const auto sys = build_pde1d(N);
  const auto guesses = pde1d_guess_family(N);
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::multistart_newton(sys.evaluator, sys.analytic_jacobian_u, guesses, 18.0, 1e-9,
                                                        60, exec_of(state)));
  label(state);
}

void batch_evaluate(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const auto sys = build_pde1d(N);
  std::vector<Vector> us;
  std::vector<double> ps;
  for (int k = 0; k < 512; ++k) {
    us.push_back(Vector::Constant(static_cast<Eigen::Index>(N - 1), 0.002 * k));
    ps.push_back(0.05 * k);
  }
  for (auto _ : state) benchmark::DoNotOptimize(kernels::batch_evaluate(sys.evaluator, us, ps, exec_of(state)));
  label(state);
}

}  // namespace

BENCHMARK(fd_jacobian)->ArgsProduct({{120, 360}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(multistart_newton)->ArgsProduct({{120, 360}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(batch_evaluate)->ArgsProduct({{360}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
