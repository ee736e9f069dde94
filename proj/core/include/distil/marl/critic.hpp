#pragma once

#include <filesystem>
#include <memory>
#include <vector>

#include "distil/marl/train_config.hpp"
#include "distil/nn/matrix.hpp"
#include "distil/replay/replay_buffer.hpp"

namespace distil::marl {

/// Q_i for each column together with dQ_i / d(action of agent i).
struct ActionGradient {
  nn::Matrix q;         // (1 x B)
  nn::Matrix d_action;  // (action_size x B)
};

/// Centralized action-value functions of all agents. Inputs are per-agent
/// matrices with one column per sample; actions are raw logits.
class Critic {
 public:
  virtual ~Critic() = default;

  /// Q_i(x, a_1..a_N) for every agent i, each (1 x B).
  virtual std::vector<nn::Matrix> q_values(const std::vector<nn::Matrix>& observations,
                                           const std::vector<nn::Matrix>& actions,
                                           bool use_target) const = 0;

  /// One gradient step on every agent's critic. `next_actions` are the target
  /// actors' logits at the next observations. Returns the mean loss over agents.
  virtual double update(const replay::Batch& batch, const std::vector<nn::Matrix>& next_actions,
                        const TrainConfig& config) = 0;

  /// Gradient flows only through agent `agent`'s action slot.
  virtual ActionGradient action_gradient(std::size_t agent,
                                         const std::vector<nn::Matrix>& observations,
                                         const std::vector<nn::Matrix>& actions) = 0;

  virtual void soft_update(double tau) = 0;

  /// Writes `<run>/agent_<i>/critic*.snap` (and shared files where applicable).
  virtual void save(const std::filesystem::path& run_dir) const = 0;
  virtual std::unique_ptr<Critic> clone() const = 0;
};

}  // namespace distil::marl
