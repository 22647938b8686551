#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>

#include "foc/foc.hpp"

using namespace foc;

namespace {

ControlSignal cosine_control(const TimeGrid& g) {
  return ControlSignal::sample(g, 0, g.steps(), [](double t) { return Vec::Constant(1, std::cos(5.0 * t)); });
}

}  // namespace

static void BM_FundamentalDoubleIntegrator(benchmark::State& st) {
  const TimeGrid g(0.0, 1.0, static_cast<std::size_t>(st.range(0)));
  const auto A = SystemMatrixFunction::constant(double_integrator());
  for (auto _ : st) benchmark::DoNotOptimize(solve_fundamental(A, g, FracOrder(0.5)));
  st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_FundamentalDoubleIntegrator)->RangeMultiplier(2)->Range(64, 512)->Complexity()->Unit(benchmark::kMillisecond);

static void BM_FundamentalTimeVarying(benchmark::State& st) {
  const TimeGrid g(0.0, 1.0, static_cast<std::size_t>(st.range(0)));
  const SystemMatrixFunction A([](double t) { return Mat::Constant(1, 1, -(1.0 + t)); }, 1, 2.0);
  for (auto _ : st) benchmark::DoNotOptimize(solve_fundamental(A, g, FracOrder(0.3)));
}
BENCHMARK(BM_FundamentalTimeVarying)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);

static void BM_MotionDirect(benchmark::State& st) {
  const auto P = example2_problem(FracOrder(0.5), 0.0, 1.0, static_cast<std::size_t>(st.range(0)), 1.0);
  const auto pos = Position::initial(P.grid, Vec::Zero(2));
  const auto u = cosine_control(P.grid);
  for (auto _ : st) benchmark::DoNotOptimize(solve_motion_direct(P, pos, 1.0, u));
}
BENCHMARK(BM_MotionDirect)->RangeMultiplier(2)->Range(128, 1024)->Unit(benchmark::kMicrosecond);

static void BM_MotionRepresentation(benchmark::State& st) {
  const auto P = example2_problem(FracOrder(0.5), 0.0, 1.0, static_cast<std::size_t>(st.range(0)), 1.0);
  const auto F = solve_fundamental(P.A, P.grid, P.alpha);
  const auto pos = Position::initial(P.grid, Vec::Zero(2));
  const auto u = cosine_control(P.grid);
  for (auto _ : st) benchmark::DoNotOptimize(solve_motion_repr(P, pos, 1.0, u, F));
}
BENCHMARK(BM_MotionRepresentation)->RangeMultiplier(2)->Range(128, 1024)->Unit(benchmark::kMicrosecond);

static void BM_ValueIteration(benchmark::State& st) {
  const auto P = example3_problem(FracOrder(0.5), 0.0, 1.0, 128, 1.0, 101);
  const auto F = std::make_shared<const FundamentalMatrixField>(solve_fundamental(P.A, P.grid, P.alpha));
  const auto aux = AuxiliaryProblem::shifted(P, F, 0.05, true);
  const ZGrid zg{-3.0, 3.0, static_cast<std::size_t>(st.range(0))};
  for (auto _ : st) benchmark::DoNotOptimize(value_iteration_1d(aux, zg));
}
BENCHMARK(BM_ValueIteration)->Arg(201)->Arg(401)->Arg(801)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
