#pragma once

#include <vector>

#include "distil/marl/critic.hpp"
#include "distil/nn/adam.hpp"
#include "distil/nn/mlp.hpp"
#include "distil/rng.hpp"

namespace distil::marl {

/// Single-head attention critic.
///
///   e_j = h(g_j([o_j; a_j]))                  per-agent embedding
///   v_j = h(V e_j),  alpha_ij = softmax_{j != i}((Q e_i) . (K e_j) / sqrt(d))
///   x_i = sum_{j != i} alpha_ij v_j
///   Q_i = f_i([e_i; x_i])
///
/// h is a leaky relu; K, Q, V are shared across agents, g_j and f_i are not.
class AttentionCritic final : public Critic {
 public:
  static constexpr double kLeakySlope = 0.01;

  struct Params {
    std::vector<nn::MlpNet> embed;  // g_i: [obs_i + action, d]
    std::vector<nn::MlpNet> head;   // f_i: [2d, hidden, 1]
    nn::Matrix key;                 // (d x d)
    nn::Matrix query;
    nn::Matrix value;

    std::vector<nn::Matrix*> refs();
    std::vector<const nn::Matrix*> refs() const;
  };

  struct Gradients {
    std::vector<nn::GradientSet> embed;
    std::vector<nn::GradientSet> head;
    nn::Matrix key;
    nn::Matrix query;
    nn::Matrix value;

    std::vector<nn::Matrix*> refs();
    std::vector<const nn::Matrix*> refs() const;
  };

  /// Attended context of one agent: x_i and the weights over the other agents
  /// in ascending index order (agent i skipped).
  struct Context {
    std::vector<double> x;
    std::vector<double> weights;
  };

  AttentionCritic(std::vector<std::size_t> observation_sizes, std::size_t action_size,
                  const TrainConfig& config, Rng& rng);
  AttentionCritic(std::vector<std::size_t> observation_sizes, std::size_t action_size,
                  Params params, double learning_rate);

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

  /// Single-sample embeddings e_j of every agent.
  std::vector<std::vector<double>> embeddings(const std::vector<std::vector<double>>& observations,
                                              const std::vector<std::vector<double>>& actions) const;
  Context attention_context(const std::vector<std::vector<double>>& embeddings,
                            std::size_t agent) const;
  double attention_q(const std::vector<std::vector<double>>& observations,
                     const std::vector<std::vector<double>>& actions, std::size_t agent) const;

  /// Batched Q_i of every agent with activations cached for backward().
  std::vector<nn::Matrix> forward(const std::vector<nn::Matrix>& observations,
                                  const std::vector<nn::Matrix>& actions);
  /// Reverse pass for the last forward(); `dq[i]` is dLoss/dQ_i (1 x B). When
  /// `d_actions` is given it receives dLoss/da_j for every agent.
  Gradients backward(const std::vector<nn::Matrix>& dq,
                     std::vector<nn::Matrix>* d_actions = nullptr);

  Params& params() { return live_; }
  const Params& params() const { return live_; }
  const Params& target_params() const { return target_; }
  std::size_t embed_dim() const { return dim_; }
  std::size_t agent_count() const { return observation_sizes_.size(); }

 private:
  struct Cache {
    std::vector<nn::Matrix> pre_embed, embed, keys, queries, pre_values, values, context;
    std::vector<std::vector<nn::Matrix>> weights;  // weights[i][j], (1 x B)
    std::size_t batch = 0;
  };

  std::vector<nn::Matrix> run(const Params& p, const std::vector<nn::Matrix>& observations,
                              const std::vector<nn::Matrix>& actions, Cache* cache,
                              Params* caching_params) const;
  void check_inputs(const std::vector<nn::Matrix>& observations,
                    const std::vector<nn::Matrix>& actions) const;

  std::vector<std::size_t> observation_sizes_;
  std::size_t action_size_;
  std::size_t dim_;
  Params live_;
  Params target_;
  nn::AdamState optimizer_;
  Cache cache_;
};

}  // namespace distil::marl
