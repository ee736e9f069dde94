#include "distil/marl/centralized_critic.hpp"

#include <cmath>
#include <numeric>

#include "distil/errors.hpp"
#include "distil/marl/actor.hpp"
#include "distil/nn/snapshot.hpp"

namespace distil::marl {

namespace {

std::vector<std::size_t> critic_layers(std::size_t input, const TrainConfig& config) {
  std::vector<std::size_t> sizes{input};
  sizes.insert(sizes.end(), config.hidden_layers, config.hidden_units);
  sizes.push_back(1);
  return sizes;
}

}  // namespace

CentralizedCritic::CentralizedCritic(std::vector<std::size_t> observation_sizes,
                                     std::size_t action_size, const TrainConfig& config, Rng& rng)
    : observation_sizes_(std::move(observation_sizes)), action_size_(action_size) {
  for (std::size_t i = 0; i < observation_sizes_.size(); ++i) {
    AgentCritic a;
    a.critic = nn::MlpNet::glorot(critic_layers(input_size(), config), nn::Activation::relu, rng);
    a.target_critic = a.critic;
    a.optimizer.learning_rate = config.lr_critic;
    agents_.push_back(std::move(a));
  }
}

CentralizedCritic::CentralizedCritic(std::vector<std::size_t> observation_sizes,
                                     std::size_t action_size, std::vector<nn::MlpNet> critics,
                                     double learning_rate)
    : observation_sizes_(std::move(observation_sizes)), action_size_(action_size) {
  if (critics.size() != observation_sizes_.size()) {
    throw ArgumentError("CentralizedCritic: one critic per agent required");
  }
  for (auto& c : critics) {
    if (c.input_size() != input_size() || c.output_size() != 1) {
      throw DimensionError("CentralizedCritic: critic shape does not match joint input");
    }
    AgentCritic a;
    a.critic = std::move(c);
    a.target_critic = a.critic;
    a.optimizer.learning_rate = learning_rate;
    agents_.push_back(std::move(a));
  }
}

std::size_t CentralizedCritic::input_size() const {
  return std::accumulate(observation_sizes_.begin(), observation_sizes_.end(), std::size_t{0}) +
         observation_sizes_.size() * action_size_;
}

nn::Matrix CentralizedCritic::joint_input(const std::vector<nn::Matrix>& observations,
                                          const std::vector<nn::Matrix>& actions) const {
  if (observations.size() != agents_.size() || actions.size() != agents_.size()) {
    throw DimensionError("CentralizedCritic: expected inputs for every agent");
  }
  std::vector<nn::Matrix> blocks;
  blocks.reserve(2 * agents_.size());
  for (const auto& o : observations) blocks.push_back(o);
  for (const auto& a : actions) blocks.push_back(a);
  nn::Matrix x = nn::vstack(blocks);
  if (x.rows() != input_size()) throw DimensionError("CentralizedCritic: joint input size");
  return x;
}

std::vector<nn::Matrix> CentralizedCritic::q_values(const std::vector<nn::Matrix>& observations,
                                                    const std::vector<nn::Matrix>& actions,
                                                    bool use_target) const {
  const nn::Matrix x = joint_input(observations, actions);
  std::vector<nn::Matrix> out;
  for (const auto& a : agents_) out.push_back((use_target ? a.target_critic : a.critic).evaluate(x));
  return out;
}

double CentralizedCritic::update(const replay::Batch& batch,
                                 const std::vector<nn::Matrix>& next_actions,
                                 const TrainConfig& config) {
  const std::size_t b = batch.size();
  const nn::Matrix x = joint_input(batch.observations, batch.actions);
  nn::Matrix x_next;
  if (config.critic_loss == CriticLoss::td) {
    x_next = joint_input(batch.next_observations, next_actions);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    AgentCritic& a = agents_[i];
    nn::Matrix y = batch.rewards[i];
    if (config.critic_loss == CriticLoss::td) {
      const nn::Matrix q_next = a.target_critic.evaluate(x_next);
      for (std::size_t c = 0; c < b; ++c) {
        y(0, c) += config.gamma * (1.0 - batch.done(0, c)) * q_next(0, c);
      }
    }
    const nn::Matrix q = a.critic.forward(x);
    nn::Matrix dq(1, b);
    double loss = 0.0;
    for (std::size_t c = 0; c < b; ++c) {
      const double d = q(0, c) - y(0, c);
      if (config.critic_loss == CriticLoss::td) {
        loss += d * d;
        dq(0, c) = 2.0 * d / static_cast<double>(b);
      } else {
        loss += std::abs(d);
        dq(0, c) = (d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0)) / static_cast<double>(b);
      }
    }
    total += loss / static_cast<double>(b);
    nn::GradientSet g = a.critic.backward(dq);
    const auto refs = g.refs();
    nn::clip_grad_norm(refs, config.grad_clip);
    nn::adam_step(a.critic, g, a.optimizer);
  }
  return total / static_cast<double>(agents_.size());
}

ActionGradient CentralizedCritic::action_gradient(std::size_t agent,
                                                  const std::vector<nn::Matrix>& observations,
                                                  const std::vector<nn::Matrix>& actions) {
  if (agent >= agents_.size()) throw ArgumentError("action_gradient: agent out of range");
  const nn::Matrix x = joint_input(observations, actions);
  nn::MlpNet& net = agents_[agent].critic;
  ActionGradient out;
  out.q = net.forward(x);
  nn::Matrix dx;
  net.backward(nn::Matrix(1, x.cols(), 1.0), &dx);
  const std::size_t obs_total =
      std::accumulate(observation_sizes_.begin(), observation_sizes_.end(), std::size_t{0});
  out.d_action = nn::row_block(dx, obs_total + agent * action_size_, action_size_);
  return out;
}

void CentralizedCritic::soft_update(double tau) {
  for (auto& a : agents_) marl::soft_update(a.critic, a.target_critic, tau);
}

void CentralizedCritic::save(const std::filesystem::path& run_dir) const {
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    const auto dir = run_dir / ("agent_" + std::to_string(i));
    nn::save_snapshot(agents_[i].critic, dir / "critic.snap");
    nn::save_snapshot(agents_[i].target_critic, dir / "critic_target.snap");
  }
}

std::unique_ptr<Critic> CentralizedCritic::clone() const {
  return std::make_unique<CentralizedCritic>(*this);
}

}  // namespace distil::marl
