#pragma once

#include "distil/marl/critic.hpp"
#include "distil/nn/adam.hpp"
#include "distil/nn/mlp.hpp"
#include "distil/rng.hpp"

namespace distil::marl {

/// One MLP per agent over the concatenation [o_1..o_N, a_1..a_N].
class CentralizedCritic final : public Critic {
 public:
  struct AgentCritic {
    nn::MlpNet critic;
    nn::MlpNet target_critic;
    nn::AdamState optimizer;
  };

  CentralizedCritic(std::vector<std::size_t> observation_sizes, std::size_t action_size,
                    const TrainConfig& config, Rng& rng);
  /// Wraps explicitly constructed critics (targets start as copies).
  CentralizedCritic(std::vector<std::size_t> observation_sizes, std::size_t action_size,
                    std::vector<nn::MlpNet> critics, double learning_rate);

  std::vector<nn::Matrix> q_values(const std::vector<nn::Matrix>& observations,
                                   const std::vector<nn::Matrix>& actions,
                                   bool use_target) const override;
  double update(const replay::Batch& batch, const std::vector<nn::Matrix>& next_actions,
                const TrainConfig& config) override;
  ActionGradient action_gradient(std::size_t agent, const std::vector<nn::Matrix>& observations,
                                 const std::vector<nn::Matrix>& actions) override;
  void soft_update(double tau) override;
  void save(const std::filesystem::path& run_dir) const override;
  std::unique_ptr<Critic> clone() const override;

  std::vector<AgentCritic>& agents() { return agents_; }
  const std::vector<AgentCritic>& agents() const { return agents_; }
  std::size_t input_size() const;

  /// [o_1..o_N, a_1..a_N] stacked row-wise.
  nn::Matrix joint_input(const std::vector<nn::Matrix>& observations,
                         const std::vector<nn::Matrix>& actions) const;

 private:
  std::vector<std::size_t> observation_sizes_;
  std::size_t action_size_;
  std::vector<AgentCritic> agents_;
};

}  // namespace distil::marl
