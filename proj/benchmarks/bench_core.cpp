#include <benchmark/benchmark.h>

#include <itw/feps.hpp>
#include <itw/itowentzell.hpp>
#include <itw/mollifier.hpp>
#include <itw/rng.hpp>

namespace {

using namespace itw;

ScenarioConfig bench_scenario(std::size_t base_steps) {
  ScenarioConfig cfg;
  cfg.state_dim = 2;
  cfg.wiener_dim = 2;
  cfg.mark_dim = 1;
  cfg.horizon = 1.0;
  cfg.base_steps = base_steps;
  cfg.refinement_levels = 1;
  cfg.n_paths = 1;
  cfg.master_seed = 12;
  cfg.initial_state = {0.1, -0.1};

  cfg.state_coeffs.drift = PiecewiseSchedule<Vec>::constant(Vec{0.2, -0.1}, 1.0);
  Mat b(2, 2);
  b(0, 0) = 0.2;
  b(1, 1) = 0.15;
  cfg.state_coeffs.diffusion = PiecewiseSchedule<Mat>::constant(b, 1.0);
  JumpMapPiece gp;
  gp.form = JumpMapPiece::Form::linear;
  gp.offset = {0.05, -0.04};
  gp.coeff = Mat(2, 1, 0.02);
  cfg.state_coeffs.jump_coeff = JumpMap{PiecewiseSchedule<JumpMapPiece>({gp}, 1.0), 0.2, 2, 1};
  cfg.jump_law.total_intensity = 3.0;
  cfg.jump_law.mark_sampler = UniformBoxMarks{Vec{-1.0}, Vec{1.0}};

  cfg.field_spec.state_dim = 2;
  cfg.field_spec.basis.emplace_back(GaussianBumpBasis{Vec{0.3, -0.2}, 0.8});
  cfg.field_spec.basis.emplace_back(SinusoidBasis{Vec{1.3, -0.7}, 0.4});
  for (int p = 0; p < 2; ++p) {
    CoefficientDriver drv;
    drv.initial = 0.6;
    drv.drift = PiecewiseSchedule<double>::constant(0.3, 1.0);
    drv.diffusion = PiecewiseSchedule<Vec>::constant(Vec{0.1, -0.05}, 1.0);
    cfg.field_spec.drivers.push_back(std::move(drv));
  }
  return cfg;
}

void BM_EvolveState(benchmark::State& state) {
  const auto cfg = bench_scenario(static_cast<std::size_t>(state.range(0)));
  const auto wiener = sample_wiener(cfg.grid_at_level(0), cfg.wiener_dim, 1);
  const auto jumps = sample_jumps(cfg.horizon, cfg.jump_law, 2, 3);
  for (auto _ : state) {
    auto traj = evolve_state(cfg.state_coeffs, cfg.initial_state, wiener, jumps);
    benchmark::DoNotOptimize(traj);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EvolveState)->Arg(64)->Arg(1024);

void BM_VerifyPath(benchmark::State& state) {
  const auto cfg = bench_scenario(static_cast<std::size_t>(state.range(0)));
  const auto wiener = sample_wiener(cfg.grid_at_level(0), cfg.wiener_dim, 1);
  const auto jumps = sample_jumps(cfg.horizon, cfg.jump_law, 2, 3);
  for (auto _ : state) {
    auto v = verify_path(cfg.state_coeffs, cfg.field_spec, cfg.initial_state, wiener, jumps);
    benchmark::DoNotOptimize(v.residual_at_horizon);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_VerifyPath)->Arg(64)->Arg(1024);

void BM_Mollify2D(benchmark::State& state) {
  const auto cfg = bench_scenario(64);
  MollifierParams params;
  params.epsilon = 0.1;
  params.dim = 2;
  params.nodes_per_axis = static_cast<std::size_t>(state.range(0));
  const MollifierRule rule(params);
  const Vec c = {0.6, 0.6};
  const Vec x = {0.2, 0.1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(f_eps(c, cfg.field_spec, x, rule));
  }
}
BENCHMARK(BM_Mollify2D)->Arg(32)->Arg(64)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
