// Microbenchmarks over the hot paths on the bundled scenario: net
// construction, a single training cycle, full training to convergence,
// and end-to-end traces for each configuration scheme.

#include <benchmark/benchmark.h>

#include "pwe/configurators.hpp"
#include "pwe/layered_net.hpp"
#include "pwe/learner.hpp"
#include "pwe/raytracer.hpp"
#include "pwe/scenario.hpp"
#include "pwe/scenario_io.hpp"

namespace {

const pwe::Scenario& bundled_scenario() {
  static const pwe::Scenario s = pwe::load_scenario(PWE_SCENARIO_PATH);
  return s;
}

void BM_BuildNet(benchmark::State& state) {
  const pwe::Scenario& s = bundled_scenario();
  for (auto _ : state) {
    pwe::LayeredNet net = pwe::build_layered_net(s);
    benchmark::DoNotOptimize(net);
  }
}
BENCHMARK(BM_BuildNet);

void BM_FeedForward(benchmark::State& state) {
  const pwe::Scenario& s = bundled_scenario();
  const pwe::LayeredNet net = pwe::build_layered_net(s);
  pwe::NetState ns = pwe::make_net_state(net, s.train);
  pwe::set_input_powers(net, ns, s.train.virtual_input_fractions);
  for (auto _ : state) {
    pwe::feed_forward(net, ns);
    benchmark::DoNotOptimize(ns.deviation);
  }
}
BENCHMARK(BM_FeedForward);

void BM_TrainingCycle(benchmark::State& state) {
  const pwe::Scenario& s = bundled_scenario();
  pwe::LayeredNet net = pwe::build_layered_net(s);
  pwe::NetState ns = pwe::make_net_state(net, s.train);
  pwe::set_input_powers(net, ns, s.train.virtual_input_fractions);
  for (auto _ : state) {
    pwe::feed_forward(net, ns);
    pwe::backprop_gradients(net, ns);
    pwe::apply_updates(net, ns, s.train.eta);
    benchmark::DoNotOptimize(ns.deviation);
  }
}
BENCHMARK(BM_TrainingCycle);

void BM_TrainToConvergence(benchmark::State& state) {
  const pwe::Scenario& s = bundled_scenario();
  const pwe::LayeredNet base = pwe::build_layered_net(s);
  for (auto _ : state) {
    pwe::LayeredNet net = base;
    pwe::TrainingResult result = pwe::train(net, s.train);
    benchmark::DoNotOptimize(result.cycles_run);
  }
}
BENCHMARK(BM_TrainToConvergence);

void BM_TraceRegular(benchmark::State& state) {
  const pwe::Scenario& s = bundled_scenario();
  const pwe::EnvironmentConfig config = pwe::regular_config(s);
  const std::vector<pwe::Ray> rays =
      pwe::emit_rays(s.tx(), s.physics.ray_count,
                     pwe::dbm_to_watts(s.tx().tx_power_dbm));
  for (auto _ : state) {
    pwe::TraceResult result = pwe::trace(s, config, rays);
    benchmark::DoNotOptimize(result.received_w);
  }
}
BENCHMARK(BM_TraceRegular);

void BM_TraceRouted(benchmark::State& state) {
  const pwe::Scenario& s = bundled_scenario();
  const pwe::LayeredNet net = pwe::build_layered_net(s);
  const pwe::EnvironmentConfig config = pwe::kp_config(s, net);
  const std::vector<pwe::Ray> rays =
      pwe::emit_rays(s.tx(), s.physics.ray_count,
                     pwe::dbm_to_watts(s.tx().tx_power_dbm));
  for (auto _ : state) {
    pwe::TraceResult result = pwe::trace(s, config, rays);
    benchmark::DoNotOptimize(result.received_w);
  }
}
BENCHMARK(BM_TraceRouted);

}  // namespace

BENCHMARK_MAIN();
