#include <benchmark/benchmark.h>

#include <vector>

#include "arld/agent/agent.hpp"
#include "arld/nn/network.hpp"
#include "arld/query/uncertainty_window.hpp"
#include "arld/replay/prioritized_buffer.hpp"
#include "arld/uncertainty/uncertainty.hpp"

using namespace arld;

namespace {

nn::NetworkSpec cartpole_spec(nn::OutputKind kind) {
  return {4, {64, 64}, 2, kind, kind == nn::OutputKind::noisy ? 1u : 10u};
}

replay::Transition random_transition(Rng& rng) {
  replay::Transition t;
  for (int i = 0; i < 4; ++i) {
    t.state.push_back(uniform01(rng) - 0.5);
    t.next_state.push_back(uniform01(rng) - 0.5);
  }
  t.action = uniform_index(rng, 2);
  t.reward = 1.0;
  t.mask = std::vector<std::uint8_t>(10, 1);
  return t;
}

void BM_ForwardAllHeads(benchmark::State& state) {
  Rng rng(1);
  const auto net = nn::init_network(cartpole_spec(nn::OutputKind::bootstrapped), rng);
  const std::vector<double> s{0.01, -0.02, 0.03, 0.0};
  for (auto _ : state) {
    const auto features = nn::trunk_features(net, s);
    for (std::size_t k = 0; k < net.head_count(); ++k) {
      benchmark::DoNotOptimize(nn::output_values(net, features, nn::Head{k}));
    }
  }
}
BENCHMARK(BM_ForwardAllHeads);

void BM_Backward(benchmark::State& state) {
  Rng rng(2);
  const auto net = nn::init_network(cartpole_spec(nn::OutputKind::bootstrapped), rng);
  auto grads = net.zeros_like();
  const std::vector<double> s{0.01, -0.02, 0.03, 0.0};
  const std::vector<double> dq{1.0, -1.0};
  for (auto _ : state) {
    const auto trace = nn::trace_trunk(net, s);
    std::vector<nn::OutputGradient> g;
    for (std::size_t k = 0; k < net.head_count(); ++k) g.push_back({nn::Head{k}, dq});
    nn::backward(net, trace, g, grads);
  }
}
BENCHMARK(BM_Backward);

void BM_HeadDivergence(benchmark::State& state) {
  Rng rng(3);
  const auto net = nn::init_network(cartpole_spec(nn::OutputKind::bootstrapped), rng);
  const std::vector<double> s{0.01, -0.02, 0.03, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(uncertainty::state_uncertainty(net, s));
}
BENCHMARK(BM_HeadDivergence);

void BM_SampleBatch(benchmark::State& state) {
  Rng rng(4);
  replay::PrioritizedBuffer buf({static_cast<std::size_t>(state.range(0)), 0.6, 1e-3, 1.0});
  for (std::int64_t i = 0; i < state.range(0); ++i) buf.push(random_transition(rng));
  for (auto _ : state) benchmark::DoNotOptimize(buf.sample(32, 0.4, rng));
}
BENCHMARK(BM_SampleBatch)->Arg(10000)->Arg(100000);

void BM_ShouldQuery(benchmark::State& state) {
  Rng rng(5);
  query::UncertaintyWindow window(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(query::should_query(window, uniform01(rng), 0.1));
}
BENCHMARK(BM_ShouldQuery)->Arg(500)->Arg(100000);

void BM_TrainStep(benchmark::State& state) {
  Rng rng(6);
  agent::AgentConfig cfg;
  cfg.variant = state.range(0) == 0 ? nn::OutputKind::bootstrapped : nn::OutputKind::noisy;
  agent::Agent learner(4, 2, cfg, 7);
  replay::PrioritizedBuffer buf({10000, 0.6, 1e-3, 1.0});
  for (int i = 0; i < 10000; ++i) buf.push(random_transition(rng));
  for (auto _ : state) benchmark::DoNotOptimize(learner.train_step(buf));
  state.SetLabel(state.range(0) == 0 ? "bootstrapped" : "noisy");
}
BENCHMARK(BM_TrainStep)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
