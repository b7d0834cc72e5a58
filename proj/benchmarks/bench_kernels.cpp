#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "critwave/profile.hpp"
#include "critwave/spectral.hpp"
#include "critwave/wave_sim.hpp"

using namespace critwave;

namespace {

void BM_LaplacianApply(benchmark::State& state) {
  const RadialLaplacian lap(wave_grid({static_cast<std::size_t>(state.range(0)), 0.01, 400.0}));
  const auto& g = lap.grid();
  std::vector<double> u(g.size()), out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) u[i] = 1.0 / (1.0 + g[i] * g[i] / 8.0);
  for (auto _ : state) {
    lap.apply(u, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LaplacianApply)->Arg(2000)->Arg(8000)->Arg(32000);

void BM_WaveStep(benchmark::State& state) {
  const auto g = wave_grid({8000, 0.01, 400.0});
  WaveState st{g, {}, {}, 0.0, 0.5};
  for (double r : g.nodes()) {
    st.u.push_back(1.0 / (1.0 + r * r / 8.0));
    st.ut.push_back(0.0);
  }
  WaveSolver solver(st, state.range(0) == 0 ? TimeScheme::rk4 : TimeScheme::leapfrog);
  const double dt = solver.default_dt();
  for (auto _ : state) solver.step(dt);
}
BENCHMARK(BM_WaveStep)->Arg(0)->Arg(1);

void BM_Extraction(benchmark::State& state) {
  static const ModulationContext ctx(0.02);
  WaveState st{wave_grid({8000, 0.01, 400.0}), {}, {}, 0.0, 0.5};
  const double lambda = 0.9, b = 0.021;
  for (double r : st.grid.nodes()) {
    const double y = r / lambda;
    st.u.push_back(ctx.P(b, y) / lambda);
    st.ut.push_back(b / (lambda * lambda) * (ctx.P(b, y) + y * ctx.dP(b, y)));
  }
  for (auto _ : state) benchmark::DoNotOptimize(extract_modulation(st, ctx, 1.0));
}
BENCHMARK(BM_Extraction)->Unit(benchmark::kMicrosecond);

void BM_EigenSolve(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(solve_eigenpair());
}
BENCHMARK(BM_EigenSolve)->Unit(benchmark::kMillisecond);

void BM_BuildT1(benchmark::State& state) {
  ProfileOptions opt;
  opt.nodes = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_T1(1e-2, opt));
}
BENCHMARK(BM_BuildT1)->Arg(4000)->Arg(16000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
