#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "somite/grid.hpp"
#include "somite/initial.hpp"
#include "somite/integrator.hpp"
#include "somite/models.hpp"
#include "somite/presets.hpp"

using namespace somite;

static void BM_Laplacian(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> f(n), out(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = std::sin(0.01 * static_cast<double>(i));
  for (auto _ : state) {
    laplacian_into(f, 0.01, BoundaryMode::ZeroFlux, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Laplacian)->Arg(101)->Arg(401)->Arg(4096);

// Derivative evaluation of each lattice model on the fig9 grid.
template <class P>
static void BM_Rhs(benchmark::State& state) {
  const ModelSpec spec = P{};
  const Grid1D g = Grid1D::spanning(-5.0, 15.0, 0.05);
  ModelState s = make_state(spec, g);
  for (auto& f : s.fields)
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = 0.1 + 0.05 * std::sin(0.1 * static_cast<double>(i));
  ModelState out = make_state(spec, g);
  for (auto _ : state) {
    rhs_into(spec, s, 1.0, g, BoundaryMode::ZeroFlux, out);
    benchmark::DoNotOptimize(out.fields.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(g.n_cells()));
}
BENCHMARK(BM_Rhs<CW2Params>);
BENCHMARK(BM_Rhs<CW3Params>);
BENCHMARK(BM_Rhs<PORDParams>);
BENCHMARK(BM_Rhs<FHNParams>);

static void BM_Step(benchmark::State& state) {
  const auto spec = fig18_run(1e-4, 1);
  const auto init = make_initial(spec.model, spec.grid, spec.init, spec.sim.seed);
  SimConfig c = spec.sim;
  c.scheme = state.range(0) ? Scheme::RK4 : Scheme::Euler;
  for (auto _ : state) {
    auto next = step(init, 0.0, spec.model, spec.grid, c);
    benchmark::DoNotOptimize(next.fields.data());
  }
}
BENCHMARK(BM_Step)->Arg(0)->Arg(1);

// A full 1000-step FHN lattice run, the inner loop of the fig18 sweep.
static void BM_RunFhn(benchmark::State& state) {
  auto spec = fig18_run(1e-4, 1);
  spec.sim.t_end = 10.0;
  const auto init = make_initial(spec.model, spec.grid, spec.init, spec.sim.seed);
  for (auto _ : state) benchmark::DoNotOptimize(run(spec.model, spec.grid, init, spec.sim).times.size());
}
BENCHMARK(BM_RunFhn)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
