#include <benchmark/benchmark.h>

#include "fpl/energy_form.hpp"
#include "fpl/extremal.hpp"
#include "fpl/random_fields.hpp"
#include "fpl/solver.hpp"

#include <vector>

using namespace fpl;

namespace {

ProblemSpec mixed(int resolution, const FinslerNorm& norm = FinslerNorm::euclidean())
{
  ProblemSpec s;
  s.domain = DomainSpec::square(resolution);
  s.norm = norm;
  s.kind = MixedSingular{0.5, 0.5, Expression(1.0), Expression(1.0)};
  return s;
}

void BM_NormEvaluate(benchmark::State& state)
{
  const auto norm = state.range(0) == 0 ? FinslerNorm::euclidean() : FinslerNorm::lt(4.0);
  double x = 0.3, acc = 0.0;
  for (auto _ : state) {
    acc += norm.evaluate2(x, 0.7);
    x += 1e-9;
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_NormEvaluate)->Arg(0)->Arg(1);

void BM_DirichletGradient(benchmark::State& state)
{
  const auto mesh = Mesh::build(DomainSpec::square(static_cast<int>(state.range(0))));
  const EnergyForm form(mesh, FluxParams(FinslerNorm::lt(4.0), 3.0), WeightSpec::constant(1.0));
  const auto v = smoothed_random_field(mesh, 1);
  std::vector<double> grad(form.num_free());
  for (auto _ : state) {
    std::fill(grad.begin(), grad.end(), 0.0);
    benchmark::DoNotOptimize(form.dirichlet_with_gradient(v.values(), grad));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(mesh->num_triangles()));
}
BENCHMARK(BM_DirichletGradient)->Arg(32)->Arg(64)->Arg(128);

void BM_MinimizeIn(benchmark::State& state)
{
  const auto spec = mixed(static_cast<int>(state.range(0)));
  const auto mesh = Mesh::build(spec.domain);
  for (auto _ : state)
    benchmark::DoNotOptimize(minimize_In(spec, 64, Field::zeros(mesh)).iterations);
}
BENCHMARK(BM_MinimizeIn)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_SolveMixed(benchmark::State& state)
{
  auto spec = mixed(32);
  spec.options.n_schedule = geometric_schedule(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_mixed(spec).history.size());
}
BENCHMARK(BM_SolveMixed)->Arg(4)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_RayleighQuotient(benchmark::State& state)
{
  const auto spec = mixed(32);
  const auto v = smoothed_random_field(Mesh::build(spec.domain), 3);
  for (auto _ : state)
    benchmark::DoNotOptimize(rayleigh_quotient(v, spec));
}
BENCHMARK(BM_RayleighQuotient);

} // namespace

BENCHMARK_MAIN();
