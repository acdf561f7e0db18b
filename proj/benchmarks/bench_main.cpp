#include "dne/elliptic.hpp"
#include "dne/harness.hpp"
#include "dne/time_integrator.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <random>

using namespace dne;

namespace {

MeshPtr make_mesh(int dimension, int cells) {
  if (dimension == 1) return std::make_shared<const Mesh>(Mesh::interval(0.0, 1.0, cells));
  return std::make_shared<const Mesh>(Mesh::rectangle({0.0, 0.0}, {1.0, 1.0}, cells, cells));
}

std::shared_ptr<const LerayLionsOperator> affine_operator(const MeshPtr& mesh, double p_lo, double p_hi) {
  const auto p = sample_at_barycenters(*mesh, [&](const Mesh::Point& x) { return p_lo + (p_hi - p_lo) * x[0]; });
  return std::make_shared<const LerayLionsOperator>(LerayLionsOperator::isotropic(ExponentField(p), mesh->dimension()));
}

DiscreteField sine_bump(const MeshPtr& mesh, double amplitude) {
  return DiscreteField::interpolate(mesh, [&](const Mesh::Point& x) {
    double v = amplitude;
    for (int i = 0; i < mesh->dimension(); ++i) v *= std::sin(std::numbers::pi * x[static_cast<std::size_t>(i)]);
    return v;
  });
}

/// Operator kernels at random gradients; range(0) is the space dimension.
void BM_OperatorKernels(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const auto op = LerayLionsOperator::isotropic(ExponentField({1.7, 2.4, 3.3}), dim);
  std::mt19937_64 engine(7);
  std::normal_distribution<double> normal;
  std::vector<Vec> xis(256, Vec(dim));
  for (auto& xi : xis)
    for (int i = 0; i < dim; ++i) xi[i] = normal(engine);
  std::size_t k = 0;
  for (auto _ : state) {
    const Vec& xi = xis[k % xis.size()];
    const std::size_t point = k % op.num_points();
    benchmark::DoNotOptimize(op.eval_A(point, xi));
    benchmark::DoNotOptimize(op.eval_flux(point, xi));
    benchmark::DoNotOptimize(op.eval_flux_jacobian(point, xi));
    ++k;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_OperatorKernels)->Arg(1)->Arg(2)->Arg(3);

/// Lambda problem on a uniform 1D mesh; range(0) is the cell count.
void BM_LambdaSolve1d(benchmark::State& state) {
  const auto mesh = make_mesh(1, static_cast<int>(state.range(0)));
  const auto op = std::make_shared<const LerayLionsOperator>(
      LerayLionsOperator::isotropic(ExponentField::constant(3.0, mesh->num_elements()), 1));
  for (auto _ : state) benchmark::DoNotOptimize(solve_lambda_problem(1.0, mesh, op));
}
BENCHMARK(BM_LambdaSolve1d)->Arg(100)->Arg(400)->Arg(1600)->Unit(benchmark::kMillisecond);

/// Stationary solve on the unit square with variable p; range(0) cells per side.
void BM_StationarySolve2d(benchmark::State& state) {
  const auto mesh = make_mesh(2, static_cast<int>(state.range(0)));
  const Model model{mesh, affine_operator(mesh, 2.2, 2.8), nullptr, 1.3};
  const std::vector<double> b(mesh->num_vertices(), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_stationary(model, b));
}
BENCHMARK(BM_StationarySolve2d)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

/// Ten implicit Euler steps in 1D; range(0) is the cell count.
void BM_Evolve1d(benchmark::State& state) {
  const auto mesh = make_mesh(1, static_cast<int>(state.range(0)));
  const Model model{mesh, affine_operator(mesh, 2.4, 3.0), nullptr, 1.5};
  const auto h = std::make_shared<const PotentialField>(
      PotentialField::time_constant(std::vector<double>(mesh->num_vertices(), 1.0)));
  auto setup = EvolutionSetup::create(model, h, 1.0, 10, sine_bump(mesh, 0.4));
  for (auto _ : state) benchmark::DoNotOptimize(evolve(setup));
}
BENCHMARK(BM_Evolve1d)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

/// Sampled Picone check; range(0) is the sample count, range(1) the thread count.
void BM_PiconeSampling(benchmark::State& state) {
  const auto op = LerayLionsOperator::isotropic(ExponentField({1.6, 2.4, 3.1}), 2);
  const SamplingOptions options{static_cast<std::size_t>(state.range(0)), 11, static_cast<int>(state.range(1))};
  for (auto _ : state) benchmark::DoNotOptimize(check_picone(op, 1.2, options));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PiconeSampling)->Args({10000, 1})->Args({100000, 1})->Args({100000, 4})->UseRealTime()->Unit(benchmark::kMillisecond);

} // namespace

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
