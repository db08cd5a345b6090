// Hot paths: the leapfrog update, the energy functional and the two
// relaxation stages, at collision-grade resolution.

#include <benchmark/benchmark.h>

#include "dwlab/evolve.hpp"
#include "dwlab/lattice.hpp"
#include "dwlab/model.hpp"
#include "dwlab/relax.hpp"

namespace {

using namespace dwlab;

FieldState collision_state(const Grid& g) {
  const ModelParams m(1.0);
  const StaticProfile left = make_static_profile(
      initial_kink_guess(g, SeedKind::kink), m, RelaxMethod::gradient_flow, 0);
  CollisionSetup setup;
  setup.left = left;
  setup.right = mirror_profile(left);
  return compose_collision(setup, g);
}

void BM_leapfrog_step(benchmark::State& state) {
  const Grid g(-40.0, 40.0, static_cast<int>(state.range(0)));
  const ModelParams m(1.0);
  EvolveConfig cfg;
  FieldState s = collision_state(g);
  for (auto _ : state) {
    step(s, m, cfg);
    benchmark::DoNotOptimize(s.phi.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_leapfrog_step)->Arg(1601)->Arg(6401);

void BM_energy_density(benchmark::State& state) {
  const Grid g(-40.0, 40.0, static_cast<int>(state.range(0)));
  const ModelParams m(1.0);
  const FieldState s = collision_state(g);
  for (auto _ : state) {
    auto e = energy_density(s, m);
    benchmark::DoNotOptimize(e.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_energy_density)->Arg(1601)->Arg(6401);

void BM_stochastic_sweep(benchmark::State& state) {
  const Grid g(-20.0, 20.0, 801);
  const ModelParams m(1.0);
  RelaxationSchedule sched;
  sched.max_stages = 1;
  const FieldState seed = initial_kink_guess(g, SeedKind::psi_plus);
  for (auto _ : state) {
    RelaxResult r = relax_stochastic(seed, m, sched);
    benchmark::DoNotOptimize(r.profile.energy);
  }
}
BENCHMARK(BM_stochastic_sweep);

void BM_flow_iterations(benchmark::State& state) {
  const Grid g(-20.0, 20.0, 801);
  const ModelParams m(1.0);
  const double step = 0.4 * g.dx() * g.dx();
  const FieldState seed = initial_kink_guess(g, SeedKind::psi_plus);
  for (auto _ : state) {
    RelaxResult r = relax_gradient_flow(seed, m, step, 1e-300, 100);
    benchmark::DoNotOptimize(r.profile.energy);
  }
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_flow_iterations);

}  // namespace

BENCHMARK_MAIN();
