#include <benchmark/benchmark.h>

#include "polariton/config.hpp"
#include "polariton/efficiency.hpp"
#include "polariton/fitting.hpp"
#include "polariton/geometry.hpp"
#include "polariton/pulse.hpp"
#include "polariton/rng.hpp"

using namespace polariton;

namespace {

DerivedGeometry reference_geometry() {
  const auto outcome = validate(example_config());
  return derive_geometry(*outcome.config);
}

}  // namespace

static void BM_PulsePropagator(benchmark::State& state) {
  const auto g = reference_geometry();
  double delta = 1.1e6;
  for (auto _ : state) {
    benchmark::DoNotOptimize(pulse_propagator(g.omega_r_rad_s, delta, g.t_pi_s, 0.4));
    delta += 1.0;
  }
}
BENCHMARK(BM_PulsePropagator);

static void BM_SequenceAmplitude(benchmark::State& state) {
  const auto g = reference_geometry();
  double v = 0.05;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sequence_r1_amplitude(g.omega_r_rad_s, g.k_r_rad_m * v, g.t_pi_s,
                                                   0.909e-6));
    v += 1e-9;
  }
}
BENCHMARK(BM_SequenceAmplitude);

static void BM_NormalDraw(benchmark::State& state) {
  std::uint64_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rng::standard_normal(42, 0, i++));
  }
}
BENCHMARK(BM_NormalDraw);

static void BM_McEfficiency(benchmark::State& state) {
  const auto outcome = validate(example_config());
  const auto g = derive_geometry(*outcome.config);
  const DecayParams decay{150e-6, 180e-6};
  McJob job;
  job.mode = McMode::protocol;
  job.t_s_s = 7e-6;
  job.t_w_s = optimal_wait(7e-6, g).t_w_s;
  job.n_atoms = state.range(0);
  job.n_shots = 10;
  job.seed = 7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mc_efficiency(g, decay, job));
  }
  state.SetItemsProcessed(state.iterations() * job.n_atoms * job.n_shots);
}
BENCHMARK(BM_McEfficiency)->Arg(1000)->Arg(10000);

static void BM_FitExponential(benchmark::State& state) {
  const FitModel model{FitModelKind::offset_exponential, false};
  Dataset data;
  for (int i = 0; i < 41; ++i) {
    const double t = 25.0 * i / 40.0;
    const double y = 0.05 + 0.95 * std::exp(-t / 7.06);
    data.points.push_back({t, y + 0.01 * std::sin(3.0 * i), 0.01});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit(data, model));
  }
}
BENCHMARK(BM_FitExponential);

BENCHMARK_MAIN();
