#pragma once

#include <cstddef>
#include <string>

#include "distil/replay/replay_buffer.hpp"

namespace distil::marl {

enum class Algorithm { maddpg, maac_lite };
std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& name);

/// `td` bootstraps from target networks; `literal_alg1` minimizes |Q - r|.
enum class CriticLoss { td, literal_alg1 };
std::string to_string(CriticLoss c);
CriticLoss critic_loss_from_string(const std::string& name);

struct TrainConfig {
  std::size_t episodes = 5000;
  double gamma = 0.95;
  double tau = 0.01;

  // Every `update_every` episodes run `updates_per_round` rounds; a round draws
  // `sample_size` transitions and steps through them in minibatches of
  // `minibatch_size`, in sampled order.
  std::size_t update_every = 4;
  std::size_t updates_per_round = 1;
  std::size_t sample_size = 1024;
  std::size_t minibatch_size = 1024;

  double lr_actor = 1e-3;
  double lr_critic = 1e-3;
  double grad_clip = 0.5;
  double logit_l2 = 1e-3;  // weight on mean(logits^2) in every actor loss

  double noise_scale = 0.3;
  double noise_decay = 0.999;
  double noise_floor = 0.05;

  std::size_t hidden_units = 64;
  std::size_t hidden_layers = 2;
  std::size_t attention_dim = 32;  // maac_lite embedding width

  CriticLoss critic_loss = CriticLoss::td;
  std::size_t buffer_capacity = replay::kDefaultCapacity;

  /// Throws ConfigError naming the offending field.
  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

}  // namespace distil::marl
