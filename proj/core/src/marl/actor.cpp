#include "distil/marl/actor.hpp"

#include <random>

#include "distil/errors.hpp"

namespace distil::marl {

env::AgentAction select_action(const nn::MlpNet& actor, std::span<const double> observation,
                               double noise_scale, Rng& rng) {
  if (observation.size() != actor.input_size()) {
    throw ArgumentError("select_action: observation has " + std::to_string(observation.size()) +
                        " entries, actor expects " + std::to_string(actor.input_size()));
  }
  if (actor.output_size() != env::kActionSize) {
    throw ArgumentError("select_action: actor must emit 5 logits");
  }
  const nn::Matrix logits = actor.evaluate(nn::Matrix::column(observation));
  env::AgentAction action;
  for (std::size_t k = 0; k < env::kActionSize; ++k) action.logits[k] = logits(k, 0);
  if (noise_scale > 0.0) {
    std::normal_distribution<double> noise(0.0, noise_scale);
    for (double& z : action.logits) z += noise(rng);
  }
  return action;
}

void soft_update(std::span<const nn::Matrix* const> live, std::span<nn::Matrix* const> target,
                 double tau) {
  if (live.size() != target.size()) throw DimensionError("soft_update: parameter count mismatch");
  for (std::size_t i = 0; i < live.size(); ++i) {
    nn::require_same_shape(*live[i], *target[i], "soft_update");
    auto l = live[i]->values();
    auto t = target[i]->values();
    for (std::size_t j = 0; j < t.size(); ++j) t[j] = (1.0 - tau) * t[j] + tau * l[j];
  }
}

void soft_update(const nn::MlpNet& live, nn::MlpNet& target, double tau) {
  if (!live.same_architecture(target)) throw DimensionError("soft_update: architecture mismatch");
  const auto l = live.parameters();
  const auto t = target.parameters();
  soft_update(l, t, tau);
}

}  // namespace distil::marl
