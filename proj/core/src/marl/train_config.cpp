#include "distil/marl/train_config.hpp"

#include "distil/errors.hpp"

namespace distil::marl {

std::string to_string(Algorithm a) { return a == Algorithm::maddpg ? "maddpg" : "maac_lite"; }

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "maddpg") return Algorithm::maddpg;
  if (name == "maac_lite") return Algorithm::maac_lite;
  throw ConfigError("unknown algorithm '" + name + "'");
}

std::string to_string(CriticLoss c) { return c == CriticLoss::td ? "td" : "literal_alg1"; }

CriticLoss critic_loss_from_string(const std::string& name) {
  if (name == "td") return CriticLoss::td;
  if (name == "literal_alg1") return CriticLoss::literal_alg1;
  throw ConfigError("unknown critic_loss '" + name + "'");
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ConfigError("train." + field + ": " + why);
  };
  if (episodes == 0) fail("episodes", "must be >= 1");
  if (!(gamma > 0.0 && gamma < 1.0)) fail("gamma", "must lie in (0, 1)");
  if (!(tau > 0.0 && tau <= 1.0)) fail("tau", "must lie in (0, 1]");
  if (update_every == 0) fail("update_every", "must be >= 1");
  if (updates_per_round == 0) fail("updates_per_round", "must be >= 1");
  if (minibatch_size == 0) fail("minibatch_size", "must be >= 1");
  if (sample_size < minibatch_size) fail("sample_size", "must be >= minibatch_size");
  if (!(lr_actor > 0.0)) fail("lr_actor", "must be positive");
  if (!(lr_critic > 0.0)) fail("lr_critic", "must be positive");
  if (!(grad_clip >= 0.0)) fail("grad_clip", "must be >= 0 (0 disables clipping)");
  if (!(logit_l2 >= 0.0)) fail("logit_l2", "must be >= 0");
  if (!(noise_scale >= 0.0)) fail("noise_scale", "must be >= 0");
  if (!(noise_decay > 0.0 && noise_decay <= 1.0)) fail("noise_decay", "must lie in (0, 1]");
  if (!(noise_floor >= 0.0)) fail("noise_floor", "must be >= 0");
  if (hidden_units == 0) fail("hidden_units", "must be >= 1");
  if (attention_dim == 0) fail("attention_dim", "must be >= 1");
  if (buffer_capacity < sample_size) fail("buffer_capacity", "must be >= sample_size");
}

}  // namespace distil::marl
