#include <fracpoint/fixtures.hpp>
#include <fracpoint/fractional_pde.hpp>

#include <benchmark/benchmark.h>

#include <cmath>

using namespace fracpoint;

namespace {

GridFunction smooth_reaction(int cells) {
  return GridFunction::sample(cells, [](Point p) { return 1.0 + p.x * p.y; });
}

void BM_AssembleReaction(benchmark::State& state) {
  const int K = static_cast<int>(state.range(0));
  const EigenBasis basis(K, 0.75);
  const GridFunction c = smooth_reaction(basis.default_grid());
  for (auto _ : state) benchmark::DoNotOptimize(assemble_reaction_matrix(c, basis));
  state.SetComplexityN(K);
}
BENCHMARK(BM_AssembleReaction)->RangeMultiplier(2)->Range(8, 32)->Complexity();

void BM_DiracSolve(benchmark::State& state) {
  const EigenBasis basis(static_cast<int>(state.range(0)), 0.75);
  const GridFunction c = smooth_reaction(basis.default_grid());
  const MeasureRHS mu{{{{0.25, 0.3}, 1.0}, {{0.7, 0.55}, -0.5}}};
  for (auto _ : state) benchmark::DoNotOptimize(solve_linear(c, mu, basis));
}
BENCHMARK(BM_DiracSolve)->RangeMultiplier(2)->Range(8, 32);

void BM_NewtonCubic(benchmark::State& state) {
  const EigenBasis basis(static_cast<int>(state.range(0)), 0.75);
  const GridFunction f = GridFunction::sample(basis.default_grid(), [](Point p) { return 3.0 + std::cos(2 * p.x + p.y); });
  int iterations = 0;
  for (auto _ : state) {
    const auto sol = solve_semilinear(f, nonlinearities::cubic(), basis);
    iterations = sol.iterations;
    benchmark::DoNotOptimize(sol.state);
  }
  state.counters["newton_iterations"] = iterations;
}
BENCHMARK(BM_NewtonCubic)->RangeMultiplier(2)->Range(8, 32);

void BM_OptimizeFixture(benchmark::State& state) {
  const auto kind = static_cast<fixtures::Kind>(state.range(0));
  const ControlProblem prob = fixtures::make(kind, 8);
  std::size_t steps = 0;
  for (auto _ : state) {
    const auto result = optimize(prob, GridFunction::zero(prob.cells()));
    steps = result.history.records.size();
    benchmark::DoNotOptimize(result.control);
  }
  state.SetLabel(fixtures::name(kind));
  state.counters["iterations"] = static_cast<double>(steps);
}
BENCHMARK(BM_OptimizeFixture)
    ->Arg(static_cast<int>(fixtures::Kind::linear))
    ->Arg(static_cast<int>(fixtures::Kind::cubic))
    ->Arg(static_cast<int>(fixtures::Kind::active_bound))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
