#include <benchmark/benchmark.h>

#include <array>
#include <cstdint>

#include "hylomorph/dynamics.hpp"
#include "hylomorph/functionals.hpp"
#include "hylomorph/solver.hpp"

namespace {

hylo::NlsModel reference_model(std::int64_t cells, std::int64_t points) {
  const auto lattice = hylo::LatticeSpec::scaled_identity(1, 2.0);
  const std::array<std::int64_t, 1> m{cells};
  const std::array<std::int64_t, 1> n{points};
  return hylo::NlsModel(hylo::Grid::build(lattice, m, n), hylo::Potential::cosine(0.1),
                        hylo::Nonlinearity::quartic_sextic(1.0, 1.0, 0.25));
}

void BM_NlsEnergy(benchmark::State& state) {
  const auto model = reference_model(state.range(0), 64);
  const hylo::Field u = hylo::gaussian_bump(model.grid(), {state.range(0) / 2, 0, 0}, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(hylo::energy(model, u).value);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(u.size()));
}
BENCHMARK(BM_NlsEnergy)->Arg(16)->Arg(64);

void BM_StrangStep(benchmark::State& state) {
  const auto model = reference_model(16, 64);
  const hylo::Field u = hylo::gaussian_bump(model.grid(), {8, 0, 0}, 1.0);
  hylo::EvolveOptions opts;
  opts.dt = 1e-3;
  opts.steps = state.range(0);
  opts.stride = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(hylo::evolve_nls(model, u, opts).final_state.values.data());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_StrangStep)->Arg(1000);

void BM_MinimizeNls(benchmark::State& state) {
  const auto model = reference_model(4, 32);
  hylo::SolverOptions opts;
  opts.tol = 1e-6;
  for (auto _ : state) benchmark::DoNotOptimize(hylo::minimize_nls(model, opts).energy);
}
BENCHMARK(BM_MinimizeNls)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
