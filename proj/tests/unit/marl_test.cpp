#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "distil/errors.hpp"
#include "distil/marl/actor.hpp"
#include "distil/marl/attention_critic.hpp"
#include "distil/marl/centralized_critic.hpp"
#include "distil/marl/trainer.hpp"
#include "distil/nn/grad_check.hpp"
#include "distil/nn/losses.hpp"

using namespace distil;
using namespace distil::marl;
using nn::Matrix;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Matrix m(rows, cols);
  for (double& v : m.values()) v = n(rng);
  return m;
}

TrainConfig small_config() {
  TrainConfig c;
  c.hidden_units = 16;
  c.attention_dim = 8;
  c.lr_critic = 1e-2;
  c.grad_clip = 0.0;
  return c;
}

// A batch of `b` single-agent transitions with constant observation 1.
replay::Batch bandit_batch(std::size_t b, double reward, bool done) {
  std::vector<replay::Transition> ts;
  for (std::size_t k = 0; k < b; ++k) {
    replay::Transition t;
    t.observations = {{1.0}};
    t.next_observations = {{1.0}};
    t.actions = {std::vector<double>(5, 0.0)};
    t.rewards = {reward};
    t.done = done;
    ts.push_back(t);
  }
  return replay::make_batch(ts);
}

double leaky(double x) { return x > 0.0 ? x : AttentionCritic::kLeakySlope * x; }

std::vector<double> matvec(const Matrix& m, const std::vector<double>& x) {
  std::vector<double> y(m.rows(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) y[r] += m(r, c) * x[c];
  return y;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// Independent single-sample attention: returns the weights agent i puts on
// every other agent, ascending index order.
std::vector<double> oracle_weights(const AttentionCritic::Params& p,
                                   const std::vector<std::vector<double>>& e, std::size_t i) {
  const double d = static_cast<double>(p.key.rows());
  const auto q = matvec(p.query, e[i]);
  std::vector<double> scores;
  for (std::size_t j = 0; j < e.size(); ++j)
    if (j != i) scores.push_back(dot(q, matvec(p.key, e[j])) / std::sqrt(d));
  double mx = scores[0];
  for (double s : scores) mx = std::max(mx, s);
  double z = 0.0;
  for (double& s : scores) z += (s = std::exp(s - mx));
  for (double& s : scores) s /= z;
  return scores;
}

struct AttentionFixture {
  std::vector<std::size_t> obs_sizes;
  std::vector<std::vector<double>> obs, act;
  AttentionCritic critic;
};

AttentionFixture make_attention(std::size_t agents, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::size_t> sizes;
  for (std::size_t i = 0; i < agents; ++i) sizes.push_back(3 + i % 2);
  AttentionCritic critic(sizes, 5, small_config(), rng);
  std::vector<std::vector<double>> obs, act;
  std::normal_distribution<double> n(0.0, 1.0);
  for (std::size_t i = 0; i < agents; ++i) {
    std::vector<double> o(sizes[i]), a(5);
    for (double& v : o) v = n(rng);
    for (double& v : a) v = n(rng);
    obs.push_back(o);
    act.push_back(a);
  }
  return {sizes, obs, act, std::move(critic)};
}

}  // namespace

// Actors ---------------------------------------------------------------------------

TEST(SelectAction, NoiseFreeIsTheActorOutput) {
  Rng rng(1);
  const nn::MlpNet actor = nn::MlpNet::glorot({4, 8, 5}, nn::Activation::relu, rng);
  const std::vector<double> obs{0.1, -0.2, 0.3, 0.4};
  const Matrix expected = actor.evaluate(Matrix::column(obs));
  Rng draw(2), untouched(2);
  const env::AgentAction a = select_action(actor, obs, 0.0, draw);
  for (std::size_t k = 0; k < 5; ++k) EXPECT_EQ(a.logits[k], expected(k, 0));
  EXPECT_EQ(draw(), untouched());
}

TEST(SelectAction, NoiseVarianceRatio) {
  const nn::MlpNet actor({2, 5}, nn::Activation::relu);  // zero net
  const std::vector<double> obs{0.0, 0.0};
  auto variance = [&](double sigma, std::uint64_t seed) {
    Rng draw(seed);
    double sum = 0.0, sq = 0.0;
    const int n = 10000;
    for (int k = 0; k < n; ++k) {
      const auto a = select_action(actor, obs, sigma, draw);
      for (double z : a.logits) {
        sum += z;
        sq += z * z;
      }
    }
    const double m = sum / (5.0 * n);
    return sq / (5.0 * n) - m * m;
  };
  // Independent streams: each estimate has ~0.6% relative error.
  EXPECT_NEAR(variance(10.0, 4) / variance(0.01, 5) / 1e6, 1.0, 0.05);
}

TEST(SelectAction, SeededAndChecked) {
  Rng rng(3);
  const nn::MlpNet actor = nn::MlpNet::glorot({3, 5}, nn::Activation::relu, rng);
  const std::vector<double> obs{1.0, 2.0, 3.0};
  Rng a(8), b(8);
  EXPECT_EQ(select_action(actor, obs, 0.3, a).logits, select_action(actor, obs, 0.3, b).logits);
  const std::vector<double> short_obs{1.0};
  EXPECT_THROW(select_action(actor, short_obs, 0.0, a), ArgumentError);
}

TEST(SoftUpdate, TauOneCopiesTauZeroKeeps) {
  Rng rng(5);
  const nn::MlpNet live = nn::MlpNet::glorot({3, 4, 2}, nn::Activation::tanh, rng);
  nn::MlpNet target = nn::MlpNet::glorot({3, 4, 2}, nn::Activation::tanh, rng);
  const nn::MlpNet original = target;
  soft_update(live, target, 0.0);
  EXPECT_TRUE(target.same_parameters(original));
  soft_update(live, target, 1.0);
  EXPECT_TRUE(target.same_parameters(live));
}

TEST(SoftUpdate, GeometricApproach) {
  Rng rng(6);
  const nn::MlpNet live = nn::MlpNet::glorot({3, 2}, nn::Activation::relu, rng);
  nn::MlpNet target = nn::MlpNet::glorot({3, 2}, nn::Activation::relu, rng);
  const nn::MlpNet start = target;
  const double tau = 0.1;
  for (int k = 0; k < 20; ++k) soft_update(live, target, tau);
  const double keep = std::pow(1.0 - tau, 20);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 3; ++c) {
      const double expected = live.weights()[0](r, c) + keep * (start.weights()[0](r, c) - live.weights()[0](r, c));
      EXPECT_NEAR(target.weights()[0](r, c), expected, 1e-12);
    }
  nn::MlpNet slow = start;
  double initial_gap = 0.0;
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 3; ++c)
      initial_gap = std::max(initial_gap, std::abs(start.weights()[0](r, c) - live.weights()[0](r, c)));
  for (int k = 0; k < 500; ++k) soft_update(live, slow, 0.01);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 3; ++c)
      EXPECT_LT(std::abs(slow.weights()[0](r, c) - live.weights()[0](r, c)),
                std::pow(0.99, 500) * initial_gap + 1e-9);
  nn::MlpNet other({4, 2}, nn::Activation::relu);
  EXPECT_THROW(soft_update(live, other, 0.5), DimensionError);
}

// Centralized critic -------------------------------------------------------------------

TEST(CentralizedCritic, GammaZeroFirstTargetIsReward) {
  TrainConfig config = small_config();
  config.gamma = 0.0;
  CentralizedCritic critic({1}, 5, {nn::MlpNet({6, 4, 1}, nn::Activation::relu)}, 1e-3);
  const replay::Batch batch = bandit_batch(3, 0.7, false);
  // Q starts at exactly 0, so the squared error is r^2.
  EXPECT_EQ(critic.update(batch, {Matrix(5, 3)}, config), 0.7 * 0.7);
}

TEST(CentralizedCritic, GammaZeroRegressesOnReward) {
  Rng rng(7);
  TrainConfig config = small_config();
  config.gamma = 0.0;
  const replay::Batch batch = bandit_batch(8, 0.7, false);
  CentralizedCritic critic({1}, 5, config, rng);
  const std::vector<Matrix> next{Matrix(5, 8)};
  const Matrix q0 = critic.q_values(batch.observations, batch.actions, false)[0];
  const double loss = critic.update(batch, next, config);
  EXPECT_NEAR(loss, (q0(0, 0) - 0.7) * (q0(0, 0) - 0.7), 1e-12);
}

TEST(CentralizedCritic, TargetUsesTargetNetworkAndDoneMask) {
  Rng rng(8);
  TrainConfig config = small_config();
  config.gamma = 0.9;
  CentralizedCritic critic({1}, 5, config, rng);
  critic.agents()[0].target_critic = nn::MlpNet::glorot({6, 16, 16, 1}, nn::Activation::relu, rng);
  for (bool done : {false, true}) {
    CentralizedCritic c = critic;
    const replay::Batch batch = bandit_batch(4, 1.0, done);
    const std::vector<Matrix> next{Matrix(5, 4)};
    const double q = c.q_values(batch.observations, batch.actions, false)[0](0, 0);
    const double q_next = c.q_values(batch.next_observations, next, true)[0](0, 0);
    const double y = 1.0 + (done ? 0.0 : 0.9 * q_next);
    EXPECT_NEAR(c.update(batch, next, config), (q - y) * (q - y), 1e-12);
  }
}

TEST(CentralizedCritic, BanditValueConverges) {
  Rng rng(9);
  TrainConfig config = small_config();
  config.lr_critic = 1e-3;
  config.gamma = 0.0;
  CentralizedCritic critic({1}, 5, config, rng);
  const replay::Batch batch = bandit_batch(32, 1.0, false);
  const std::vector<Matrix> next{Matrix(5, 32)};
  for (int k = 0; k < 2000; ++k) critic.update(batch, next, config);
  EXPECT_NEAR(critic.q_values(batch.observations, batch.actions, false)[0](0, 0), 1.0, 0.05);
}

TEST(CentralizedCritic, ActionIgnoringCriticGivesZeroActionGradient) {
  Rng rng(10);
  nn::MlpNet net = nn::MlpNet::glorot({2 + 3 + 10, 8, 1}, nn::Activation::tanh, rng);
  for (std::size_t r = 0; r < 8; ++r)
    for (std::size_t c = 5; c < 15; ++c) net.weights()[0](r, c) = 0.0;
  CentralizedCritic critic({2, 3}, 5, {net, net}, 1e-3);
  const std::vector<Matrix> obs{random_matrix(2, 6, rng), random_matrix(3, 6, rng)};
  const std::vector<Matrix> act{random_matrix(5, 6, rng), random_matrix(5, 6, rng)};
  for (std::size_t i = 0; i < 2; ++i) {
    const ActionGradient g = critic.action_gradient(i, obs, act);
    for (double v : g.d_action.values()) EXPECT_EQ(v, 0.0);
  }
}

TEST(CentralizedCritic, LinearCriticGradientIsItsWeights) {
  Rng rng(11);
  nn::MlpNet net = nn::MlpNet::glorot({1 + 1 + 10, 1}, nn::Activation::relu, rng);
  CentralizedCritic critic({1, 1}, 5, {net, net}, 1e-3);
  const std::vector<Matrix> obs{random_matrix(1, 3, rng), random_matrix(1, 3, rng)};
  const std::vector<Matrix> act{random_matrix(5, 3, rng), random_matrix(5, 3, rng)};
  const ActionGradient g = critic.action_gradient(1, obs, act);
  for (std::size_t k = 0; k < 5; ++k)
    for (std::size_t c = 0; c < 3; ++c) EXPECT_DOUBLE_EQ(g.d_action(k, c), net.weights()[0](0, 7 + k));
  EXPECT_THROW(critic.action_gradient(2, obs, act), ArgumentError);
}

TEST(CentralizedCritic, ActionGradientMatchesFiniteDifferences) {
  Rng rng(12);
  CentralizedCritic critic({2, 2}, 5, small_config(), rng);
  const std::vector<Matrix> obs{random_matrix(2, 1, rng), random_matrix(2, 1, rng)};
  std::vector<Matrix> act{random_matrix(5, 1, rng), random_matrix(5, 1, rng)};
  const ActionGradient g = critic.action_gradient(0, obs, act);
  std::vector<Matrix*> params{&act[0]};
  std::vector<const Matrix*> grads{&g.d_action};
  const double err = nn::check_gradients(
      params, grads, [&] { return critic.q_values(obs, act, false)[0](0, 0); }, 1e-6);
  EXPECT_LT(err, 1e-5);
}

// Attention critic ----------------------------------------------------------------

TEST(AttentionCritic, TwoAgentsAttendFully) {
  auto f = make_attention(2, 13);
  const auto e = f.critic.embeddings(f.obs, f.act);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto ctx = f.critic.attention_context(e, i);
    ASSERT_EQ(ctx.weights.size(), 1u);
    EXPECT_DOUBLE_EQ(ctx.weights[0], 1.0);
  }
}

TEST(AttentionCritic, IdenticalAgentsGetUniformWeights) {
  auto f = make_attention(4, 14);
  const std::vector<std::vector<double>> same(4, std::vector<double>(8, 0.3));
  const auto ctx = f.critic.attention_context(same, 1);
  for (double w : ctx.weights) EXPECT_NEAR(w, 1.0 / 3.0, 1e-15);
}

TEST(AttentionCritic, WeightsMatchLoopOracle) {
  for (std::uint64_t seed : {15u, 16u, 17u}) {
    auto f = make_attention(4, seed);
    const auto e = f.critic.embeddings(f.obs, f.act);
    // Embeddings are the leaky activation of each agent's own encoder.
    for (std::size_t j = 0; j < 4; ++j) {
      std::vector<double> in = f.obs[j];
      in.insert(in.end(), f.act[j].begin(), f.act[j].end());
      const Matrix pre = f.critic.params().embed[j].evaluate(Matrix::column(in));
      for (std::size_t k = 0; k < 8; ++k) EXPECT_NEAR(e[j][k], leaky(pre(k, 0)), 1e-14);
    }
    for (std::size_t i = 0; i < 4; ++i) {
      const auto ctx = f.critic.attention_context(e, i);
      const auto w = oracle_weights(f.critic.params(), e, i);
      EXPECT_NEAR(std::accumulate(ctx.weights.begin(), ctx.weights.end(), 0.0), 1.0, 1e-12);
      for (std::size_t k = 0; k < w.size(); ++k) EXPECT_NEAR(ctx.weights[k], w[k], 1e-12);
      std::vector<double> x(8, 0.0);
      std::size_t k = 0;
      for (std::size_t j = 0; j < 4; ++j) {
        if (j == i) continue;
        const auto v = matvec(f.critic.params().value, e[j]);
        for (std::size_t r = 0; r < 8; ++r) x[r] += w[k] * leaky(v[r]);
        ++k;
      }
      for (std::size_t r = 0; r < 8; ++r) EXPECT_NEAR(ctx.x[r], x[r], 1e-12);
    }
  }
}

TEST(AttentionCritic, ZeroHeadGivesZeroQ) {
  auto f = make_attention(3, 18);
  AttentionCritic::Params p = f.critic.params();
  for (auto& h : p.head) h = nn::MlpNet(h.layer_sizes(), h.activation());
  AttentionCritic zero(f.obs_sizes, 5, p, 1e-3);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(zero.attention_q(f.obs, f.act, i), 0.0);
}

TEST(AttentionCritic, InvariantToOrderOfOtherAgents) {
  Rng rng(19);
  std::vector<std::size_t> sizes(3, 4);
  AttentionCritic critic(sizes, 5, small_config(), rng);
  std::vector<std::vector<double>> obs(3, std::vector<double>(4)), act(3, std::vector<double>(5));
  std::normal_distribution<double> n(0.0, 1.0);
  for (auto& o : obs) for (double& v : o) v = n(rng);
  for (auto& a : act) for (double& v : a) v = n(rng);
  // Swap agents 1 and 2 together with their encoders.
  AttentionCritic::Params p = critic.params();
  std::swap(p.embed[1], p.embed[2]);
  std::swap(p.head[1], p.head[2]);
  AttentionCritic swapped(sizes, 5, p, 1e-3);
  std::vector<std::vector<double>> obs_s{obs[0], obs[2], obs[1]}, act_s{act[0], act[2], act[1]};
  EXPECT_NEAR(critic.attention_q(obs, act, 0), swapped.attention_q(obs_s, act_s, 0), 1e-12);
  EXPECT_NEAR(critic.attention_q(obs, act, 1), swapped.attention_q(obs_s, act_s, 2), 1e-12);
}

TEST(AttentionCritic, BatchedMatchesSingleSample) {
  auto f = make_attention(3, 20);
  Rng rng(21);
  std::vector<Matrix> obs, act;
  for (std::size_t j = 0; j < 3; ++j) {
    obs.push_back(random_matrix(f.obs_sizes[j], 5, rng));
    act.push_back(random_matrix(5, 5, rng));
  }
  const auto q = f.critic.q_values(obs, act, false);
  for (std::size_t c = 0; c < 5; ++c) {
    std::vector<std::vector<double>> o, a;
    for (std::size_t j = 0; j < 3; ++j) {
      o.push_back(obs[j].column_values(c));
      a.push_back(act[j].column_values(c));
    }
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(q[i](0, c), f.critic.attention_q(o, a, i), 1e-12);
  }
}

TEST(AttentionCritic, BackwardMatchesFiniteDifferences) {
  auto f = make_attention(3, 22);
  Rng rng(23);
  std::vector<Matrix> obs, act;
  for (std::size_t j = 0; j < 3; ++j) {
    obs.push_back(random_matrix(f.obs_sizes[j], 4, rng));
    act.push_back(random_matrix(5, 4, rng));
  }
  auto loss = [&] {
    double total = 0.0;
    for (const Matrix& q : f.critic.q_values(obs, act, false))
      for (double v : q.values()) total += v * v;
    return total;
  };
  const auto q = f.critic.forward(obs, act);
  std::vector<Matrix> dq;
  for (const Matrix& m : q) {
    Matrix g = m;
    g *= 2.0;
    dq.push_back(g);
  }
  std::vector<Matrix> d_actions;
  const auto grads = f.critic.backward(dq, &d_actions);
  EXPECT_LT(nn::check_gradients(f.critic.params().refs(), grads.refs(), loss, 1e-6), 1e-4);
  std::vector<Matrix*> a_refs;
  std::vector<const Matrix*> g_refs;
  for (std::size_t j = 0; j < 3; ++j) {
    a_refs.push_back(&act[j]);
    g_refs.push_back(&d_actions[j]);
  }
  EXPECT_LT(nn::check_gradients(a_refs, g_refs, loss, 1e-6), 1e-4);
}

TEST(AttentionCritic, NeedsTwoAgentsAndMatchingShapes) {
  Rng rng(24);
  EXPECT_THROW(AttentionCritic({3}, 5, small_config(), rng), ArgumentError);
  auto f = make_attention(2, 25);
  std::vector<Matrix> obs{Matrix(3, 2), Matrix(3, 2)}, act{Matrix(5, 2), Matrix(5, 2)};
  EXPECT_THROW(f.critic.q_values(obs, act, false), DimensionError);
}

// Trainer --------------------------------------------------------------------------

TEST(Trainer, UpdateCadence) {
  TrainConfig config = small_config();
  config.update_every = 4;
  config.sample_size = 16;
  config.minibatch_size = 8;
  Trainer t(env::ScenarioSpec::spread(2, 2), Algorithm::maddpg, config, 3);
  const nn::MlpNet before = t.actors()[0].actor;
  for (int e = 1; e <= 3; ++e) {
    const EpisodeStats s = t.train_episode();
    EXPECT_EQ(s.updates, 0u);
    EXPECT_TRUE(t.actors()[0].actor.same_parameters(before)) << "episode " << e;
  }
  EXPECT_GT(t.train_episode().updates, 0u);
  EXPECT_FALSE(t.actors()[0].actor.same_parameters(before));
  EXPECT_EQ(t.buffer().size(), 100u);
}

TEST(Trainer, SameSeedSameRun) {
  TrainConfig config = small_config();
  config.update_every = 1;
  config.sample_size = 32;
  config.minibatch_size = 16;
  for (Algorithm alg : {Algorithm::maddpg, Algorithm::maac_lite}) {
    Trainer a(env::ScenarioSpec::spread(2, 2), alg, config, 5);
    Trainer b(env::ScenarioSpec::spread(2, 2), alg, config, 5);
    for (int e = 0; e < 4; ++e) {
      const EpisodeStats sa = a.train_episode();
      const EpisodeStats sb = b.train_episode();
      EXPECT_EQ(sa.mean_reward, sb.mean_reward);
      EXPECT_EQ(sa.critic_loss, sb.critic_loss);
    }
    EXPECT_TRUE(a.actors()[1].actor.same_parameters(b.actors()[1].actor));
  }
}

TEST(Trainer, NoiseDecaysToFloor) {
  TrainConfig config = small_config();
  config.noise_scale = 0.3;
  config.noise_decay = 0.5;
  config.noise_floor = 0.05;
  config.sample_size = 100000;  // never ready: no updates
  Trainer t(env::ScenarioSpec::spread(1, 1), Algorithm::maddpg, config, 1);
  EXPECT_EQ(t.train_episode().noise, 0.3);
  EXPECT_DOUBLE_EQ(t.noise_scale(), 0.15);
  for (int e = 0; e < 5; ++e) t.train_episode();
  EXPECT_EQ(t.noise_scale(), 0.05);
}

TEST(Trainer, TeamRewardIsAgentMean) {
  EpisodeStats s;
  s.mean_reward = {-1.0, -2.0, -3.0};
  EXPECT_DOUBLE_EQ(s.team_reward(), -2.0);
}
