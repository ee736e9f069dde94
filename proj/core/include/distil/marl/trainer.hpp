#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "distil/env/scenario.hpp"
#include "distil/env/world.hpp"
#include "distil/marl/actor.hpp"
#include "distil/marl/critic.hpp"
#include "distil/marl/train_config.hpp"
#include "distil/replay/replay_buffer.hpp"
#include "distil/reuse/transfer.hpp"

namespace distil::marl {

/// One row of the training log. Loss columns are means over the actor
/// updates performed in the episode, zero when there were none.
struct EpisodeStats {
  std::size_t episode = 0;
  std::vector<double> mean_reward;  // per agent, mean per-step reward
  double q_loss = 0.0;              // L_Q = -mean Q
  double critic_loss = 0.0;
  double reuse_loss = 0.0;
  double scaled_reuse_loss = 0.0;
  double alpha = 0.0;
  double noise = 0.0;
  std::size_t updates = 0;

  /// Mean of mean_reward over agents: the value the learning curves track.
  double team_reward() const;
};

/// Owns the environment, actors, critic and replay buffer of one seeded run.
/// Every random draw comes from streams derived from `seed`, so (spec,
/// algorithm, config, seed) fixes the whole run.
class Trainer {
 public:
  Trainer(env::ScenarioSpec spec, Algorithm algorithm, TrainConfig config, std::uint64_t seed,
          std::optional<reuse::TransferContext> transfer = std::nullopt);

  /// Rolls one episode, then updates on the configured cadence.
  EpisodeStats train_episode();

  /// Noise-free rollouts on episodes seeded independently of training; returns
  /// the mean per-step reward averaged over agents and episodes.
  double evaluate(std::size_t episodes, std::uint64_t seed) const;

  /// One round of updates: a sample of `sample_size` transitions processed in
  /// minibatches. Exposed so tests can drive updates directly.
  void update_round(EpisodeStats& stats);

  /// Writes `<run>/agent_<i>/actor[_target].snap` and the critic files.
  void save(const std::filesystem::path& run_dir) const;

  std::vector<ActorNets>& actors() { return actors_; }
  const std::vector<ActorNets>& actors() const { return actors_; }
  Critic& critic() { return *critic_; }
  const Critic& critic() const { return *critic_; }
  replay::ReplayBuffer& buffer() { return buffer_; }
  const env::ScenarioSpec& spec() const { return spec_; }
  const TrainConfig& config() const { return config_; }
  std::vector<std::size_t> observation_sizes() const { return observation_sizes_; }
  std::size_t episodes_done() const { return episodes_done_; }
  double noise_scale() const { return noise_; }
  std::optional<reuse::TransferContext>& transfer() { return transfer_; }

 private:
  struct ActorUpdate {
    double q_loss = 0.0;
    double reuse_loss = 0.0;
    double scaled_reuse_loss = 0.0;
  };
  ActorUpdate update_actor(std::size_t agent, const replay::Batch& batch, double alpha);
  std::vector<std::vector<double>> observe_all(const env::WorldState& state) const;

  env::ScenarioSpec spec_;
  Algorithm algorithm_;
  TrainConfig config_;
  std::vector<std::size_t> observation_sizes_;
  std::vector<ActorNets> actors_;
  std::unique_ptr<Critic> critic_;
  replay::ReplayBuffer buffer_;
  std::optional<reuse::TransferContext> transfer_;
  Rng action_rng_;
  Rng episode_rng_;
  double noise_;
  std::size_t episodes_done_ = 0;
};

/// Actor layer sizes [obs, hidden x layers, 5] for this config.
std::vector<std::size_t> actor_layers(std::size_t observation_size, const TrainConfig& config);

}  // namespace distil::marl
