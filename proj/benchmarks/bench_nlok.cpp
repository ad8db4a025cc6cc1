#include <benchmark/benchmark.h>

#include <cmath>

#include "nlok/functionals.hpp"
#include "nlok/onedim.hpp"
#include "nlok/quad.hpp"
#include "nlok/sets.hpp"
#include "nlok/shapeopt.hpp"

using namespace nlok;

namespace {

StarShape2D bench_star(std::size_t m) {
  FourierCoefficients c;
  c.r0 = 1.0;
  c.a = {0.0, 0.1, 0.05};
  c.b = {0.02, 0.0, 0.03};
  return volume_project(fourier_shape(c, m));
}

Params plane() {
  Params p;
  p.n = 2;
  p.eps = 1e-3;
  return p;
}

}  // namespace

static void BM_CurvatureOnMesh(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto mesh = boundary_mesh(SetGeometry(bench_star(m)), m);
  for (auto _ : state) benchmark::DoNotOptimize(curvature_on_mesh(mesh, 0.5));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CurvatureOnMesh)->RangeMultiplier(2)->Range(64, 512)->Complexity();

static void BM_PerimeterOnMesh(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto mesh = boundary_mesh(SetGeometry(bench_star(m)), m);
  for (auto _ : state) benchmark::DoNotOptimize(perimeter_on_mesh(mesh, 0.5));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PerimeterOnMesh)->RangeMultiplier(2)->Range(64, 512)->Complexity();

static void BM_BoundaryFields(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const SetGeometry star = bench_star(m);
  const Params p = plane();
  for (auto _ : state) benchmark::DoNotOptimize(boundary_fields(star, p, m));
}
BENCHMARK(BM_BoundaryFields)->Arg(128)->Arg(256);

static void BM_SolveCriticalD(benchmark::State& state) {
  Params p;
  p.eps = std::pow(10.0, -static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_critical_d(p));
}
BENCHMARK(BM_SolveCriticalD)->DenseRange(3, 6);

static void BM_IntegrateSingular(benchmark::State& state) {
  QuadTolerance tol;
  tol.rel_tol = 1e-10;
  const auto f = [](double x) { return std::pow(x, -0.5) * std::cos(x); };
  for (auto _ : state) benchmark::DoNotOptimize(integrate(f, 0.0, 10.0, tol));
}
BENCHMARK(BM_IntegrateSingular);

static void BM_GradientStep(benchmark::State& state) {
  OptimizerOptions opts;
  opts.resolution = static_cast<std::size_t>(state.range(0));
  const Params p = plane();
  const OptimizerState start(bench_star(opts.resolution));
  for (auto _ : state) benchmark::DoNotOptimize(el_gradient_step(start, p, opts));
}
BENCHMARK(BM_GradientStep)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
