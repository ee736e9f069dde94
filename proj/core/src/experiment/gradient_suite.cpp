#include "distil/experiment/gradient_suite.hpp"

#include <random>

#include "distil/marl/attention_critic.hpp"
#include "distil/marl/centralized_critic.hpp"
#include "distil/nn/grad_check.hpp"
#include "distil/reuse/reuse_loss.hpp"

namespace distil::experiment {

namespace {

nn::Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  nn::Matrix m(rows, cols);
  for (double& v : m.values()) v = n(rng);
  return m;
}

GradientCheckResult result(std::string name, double error) {
  return {std::move(name), error, error < kGradientTolerance};
}

// Relu networks are checked away from their kinks: draw inputs until every
// hidden pre-activation clears the finite-difference step by a wide margin.
nn::Matrix smooth_input(const nn::MlpNet& net, std::size_t batch, Rng& rng) {
  for (;;) {
    nn::Matrix x = random_matrix(net.input_size(), batch, rng);
    if (nn::kink_margin(net, x) > 1e-3) return x;
  }
}

double mimic_check(reuse::LossKind kind, double temperature, Rng& rng) {
  nn::MlpNet student = nn::MlpNet::glorot({6, 16, 16, 5}, nn::Activation::tanh, rng);
  const nn::Matrix teacher_logits = random_matrix(5, 4, rng, 2.0);
  const nn::Matrix input = random_matrix(6, 4, rng);
  return nn::grad_check(
      student,
      [&](const nn::Matrix& logits) {
        return reuse::reuse_loss_from_logits(logits, teacher_logits, kind, temperature);
      },
      input);
}

struct JointInputs {
  std::vector<nn::Matrix> observations;
  std::vector<nn::Matrix> actions;
};

JointInputs joint_inputs(const std::vector<std::size_t>& sizes, std::size_t batch, Rng& rng) {
  JointInputs in;
  for (std::size_t s : sizes) {
    in.observations.push_back(random_matrix(s, batch, rng));
    in.actions.push_back(random_matrix(env::kActionSize, batch, rng));
  }
  return in;
}

// L = -mean Q_agent with the agent's action produced by `actor`; checks the
// actor parameters against finite differences of the whole pipeline.
double actor_path_check(marl::Critic& critic, nn::MlpNet& actor, std::size_t agent,
                        JointInputs in) {
  const double inv_b = 1.0 / static_cast<double>(in.observations[agent].cols());
  in.actions[agent] = actor.forward(in.observations[agent]);
  const marl::ActionGradient ag = critic.action_gradient(agent, in.observations, in.actions);
  nn::Matrix grad = ag.d_action;
  grad *= -inv_b;
  const nn::GradientSet g = actor.backward(grad);
  const auto params = actor.parameters();
  const auto analytic = g.refs();
  return nn::check_gradients(params, analytic, [&] {
    std::vector<nn::Matrix> actions = in.actions;
    actions[agent] = actor.evaluate(in.observations[agent]);
    return -critic.q_values(in.observations, actions, false)[agent].sum() * inv_b;
  });
}

}  // namespace

std::vector<GradientCheckResult> run_gradient_suite(std::uint64_t seed) {
  Rng rng = make_rng(seed, 0x9c);
  std::vector<GradientCheckResult> out;

  out.push_back(result("mse mimicking loss", mimic_check(reuse::LossKind::mse, 1.0, rng)));
  out.push_back(result("kd loss T=1", mimic_check(reuse::LossKind::kd_kl, 1.0, rng)));
  out.push_back(result("kd loss T=3", mimic_check(reuse::LossKind::kd_kl, 3.0, rng)));
  out.push_back(result("ce loss T=1", mimic_check(reuse::LossKind::ce, 1.0, rng)));
  out.push_back(result("ce loss T=3", mimic_check(reuse::LossKind::ce, 3.0, rng)));

  marl::TrainConfig config;
  config.hidden_units = 16;
  config.hidden_layers = 2;
  config.attention_dim = 8;
  const std::vector<std::size_t> sizes{4, 5, 6};
  const std::size_t batch = 3;

  {
    marl::CentralizedCritic critic(sizes, env::kActionSize, config, rng);
    nn::MlpNet& q = critic.agents()[1].critic;
    const nn::Matrix x = smooth_input(q, batch, rng);
    const nn::Matrix y = random_matrix(1, batch, rng);
    out.push_back(result("centralized critic regression",
                         nn::grad_check(
                             q, [&](const nn::Matrix& v) { return nn::mse_loss(v, y); }, x)));
  }
  {
    marl::CentralizedCritic critic(sizes, env::kActionSize, config, rng);
    nn::MlpNet actor = nn::MlpNet::glorot({sizes[0], 16, 16, 5}, nn::Activation::relu, rng);
    JointInputs in = joint_inputs(sizes, batch, rng);
    in.observations[0] = smooth_input(actor, batch, rng);
    out.push_back(result("actor through centralized critic", actor_path_check(critic, actor, 0, in)));
  }
  {
    marl::AttentionCritic critic(sizes, env::kActionSize, config, rng);
    const JointInputs in = joint_inputs(sizes, batch, rng);
    const std::vector<double> weights{0.7, -1.3, 0.4};
    std::vector<nn::Matrix> dq;
    for (double w : weights) dq.push_back(nn::Matrix(1, batch, w / static_cast<double>(batch)));
    critic.forward(in.observations, in.actions);
    std::vector<nn::Matrix> d_actions;
    marl::AttentionCritic::Gradients g = critic.backward(dq, &d_actions);
    auto loss = [&](const std::vector<nn::Matrix>& actions) {
      const auto q = critic.q_values(in.observations, actions, false);
      double l = 0.0;
      for (std::size_t i = 0; i < q.size(); ++i) {
        l += weights[i] * q[i].sum() / static_cast<double>(batch);
      }
      return l;
    };
    const auto params = critic.params().refs();
    const auto analytic = g.refs();
    out.push_back(result("attention critic parameters",
                         nn::check_gradients(params, analytic, [&] { return loss(in.actions); })));

    std::vector<nn::Matrix> actions = in.actions;
    std::vector<nn::Matrix*> action_refs;
    std::vector<const nn::Matrix*> action_grads;
    for (std::size_t j = 0; j < actions.size(); ++j) {
      action_refs.push_back(&actions[j]);
      action_grads.push_back(&d_actions[j]);
    }
    out.push_back(result("attention critic action input",
                         nn::check_gradients(action_refs, action_grads,
                                             [&] { return loss(actions); })));
  }
  {
    marl::AttentionCritic critic(sizes, env::kActionSize, config, rng);
    nn::MlpNet actor = nn::MlpNet::glorot({sizes[2], 16, 16, 5}, nn::Activation::relu, rng);
    JointInputs in = joint_inputs(sizes, batch, rng);
    in.observations[2] = smooth_input(actor, batch, rng);
    out.push_back(result("actor through attention critic", actor_path_check(critic, actor, 2, in)));
  }
  return out;
}

}  // namespace distil::experiment
