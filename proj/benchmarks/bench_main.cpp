#include <benchmark/benchmark.h>

#include "distil/env/world.hpp"
#include "distil/marl/attention_critic.hpp"
#include "distil/marl/centralized_critic.hpp"
#include "distil/nn/mlp.hpp"
#include "distil/replay/replay_buffer.hpp"

using namespace distil;

namespace {

nn::Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  nn::Matrix m(rows, cols);
  for (double& v : m.values()) v = n(rng);
  return m;
}

void BM_MlpForwardBackward(benchmark::State& state) {
  Rng rng(1);
  const auto batch = static_cast<std::size_t>(state.range(0));
  nn::MlpNet net = nn::MlpNet::glorot({14, 64, 64, 5}, nn::Activation::relu, rng);
  const nn::Matrix x = random_matrix(14, batch, rng);
  const nn::Matrix g = random_matrix(5, batch, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(net.forward(x));
    benchmark::DoNotOptimize(net.backward(g));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MlpForwardBackward)->Arg(1)->Arg(256)->Arg(1024);

void BM_EnvStep(benchmark::State& state) {
  const env::ScenarioSpec spec = state.range(0) == 0 ? env::ScenarioSpec::spread(3, 3)
                                                     : env::ScenarioSpec::treasure(4, 2);
  env::WorldState s = env::reset(spec, 1);
  Rng rng(2);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<env::AgentAction> actions(spec.agent_count());
  for (auto& a : actions)
    for (double& z : a.logits) z = n(rng);
  for (auto _ : state) {
    if (s.step_count >= spec.episode_length) s = env::reset(spec, s.step_count);
    benchmark::DoNotOptimize(env::step(s, actions));
    for (std::size_t i = 0; i < spec.agent_count(); ++i) benchmark::DoNotOptimize(env::observe(s, i));
  }
}
BENCHMARK(BM_EnvStep)->Arg(0)->Arg(1);

void BM_ReplaySample(benchmark::State& state) {
  replay::ReplayBuffer buffer({{14, 14, 14}, 5}, 100000, 3);
  replay::Transition t;
  t.observations.assign(3, std::vector<double>(14, 0.5));
  t.next_observations = t.observations;
  t.actions.assign(3, std::vector<double>(5, 0.1));
  t.rewards.assign(3, -1.0);
  for (int k = 0; k < 20000; ++k) buffer.push(t);
  for (auto _ : state) {
    const auto sample = buffer.sample(1024);
    benchmark::DoNotOptimize(replay::make_batch(sample));
  }
}
BENCHMARK(BM_ReplaySample);

template <class CriticT>
void critic_update(benchmark::State& state) {
  Rng rng(4);
  marl::TrainConfig config;
  const std::vector<std::size_t> sizes{14, 14, 14};
  CriticT critic(sizes, 5, config, rng);
  std::vector<replay::Transition> ts;
  for (int k = 0; k < 256; ++k) {
    replay::Transition t;
    for (std::size_t i = 0; i < 3; ++i) {
      t.observations.push_back(random_matrix(14, 1, rng).column_values(0));
      t.next_observations.push_back(random_matrix(14, 1, rng).column_values(0));
      t.actions.push_back(random_matrix(5, 1, rng).column_values(0));
      t.rewards.push_back(-1.0);
    }
    ts.push_back(t);
  }
  const replay::Batch batch = replay::make_batch(ts);
  const std::vector<nn::Matrix> next(3, random_matrix(5, 256, rng));
  for (auto _ : state) benchmark::DoNotOptimize(critic.update(batch, next, config));
}

void BM_CentralizedCriticUpdate(benchmark::State& state) { critic_update<marl::CentralizedCritic>(state); }
void BM_AttentionCriticUpdate(benchmark::State& state) { critic_update<marl::AttentionCritic>(state); }
BENCHMARK(BM_CentralizedCriticUpdate);
BENCHMARK(BM_AttentionCriticUpdate);

}  // namespace

BENCHMARK_MAIN();
