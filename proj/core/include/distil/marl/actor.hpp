#pragma once

#include <span>

#include "distil/env/world.hpp"
#include "distil/nn/adam.hpp"
#include "distil/nn/mlp.hpp"
#include "distil/rng.hpp"

namespace distil::marl {

/// Policy of one agent plus its slowly tracking target copy.
struct ActorNets {
  nn::MlpNet actor;
  nn::MlpNet target_actor;
  nn::AdamState optimizer;
};

/// logits = actor(observation) + N(0, noise_scale^2) per component. A zero
/// noise scale draws nothing from `rng`.
env::AgentAction select_action(const nn::MlpNet& actor, std::span<const double> observation,
                               double noise_scale, Rng& rng);

/// target <- (1 - tau) * target + tau * live, element-wise.
void soft_update(const nn::MlpNet& live, nn::MlpNet& target, double tau);
void soft_update(std::span<const nn::Matrix* const> live, std::span<nn::Matrix* const> target,
                 double tau);

}  // namespace distil::marl
