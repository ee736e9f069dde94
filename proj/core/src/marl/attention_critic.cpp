#include "distil/marl/attention_critic.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "distil/errors.hpp"
#include "distil/marl/actor.hpp"
#include "distil/nn/snapshot.hpp"

namespace distil::marl {

namespace {

double leaky(double x) { return x > 0.0 ? x : AttentionCritic::kLeakySlope * x; }
double leaky_slope(double x) { return x > 0.0 ? 1.0 : AttentionCritic::kLeakySlope; }

nn::Matrix apply_leaky(const nn::Matrix& m) {
  nn::Matrix out = m;
  for (double& v : out.values()) v = leaky(v);
  return out;
}

// grad * h'(pre), element-wise
nn::Matrix leaky_backward(const nn::Matrix& grad, const nn::Matrix& pre) {
  nn::Matrix out = grad;
  auto o = out.values();
  const auto p = pre.values();
  for (std::size_t k = 0; k < o.size(); ++k) o[k] *= leaky_slope(p[k]);
  return out;
}

nn::Matrix glorot_square(std::size_t d, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(2 * d));
  std::uniform_real_distribution<double> u(-limit, limit);
  nn::Matrix m(d, d);
  for (double& v : m.values()) v = u(rng);
  return m;
}

std::vector<nn::Matrix*> net_refs(nn::MlpNet& n) { return n.parameters(); }
std::vector<const nn::Matrix*> net_refs(const nn::MlpNet& n) { return n.parameters(); }
std::vector<nn::Matrix*> net_refs(nn::GradientSet& g) { return g.refs(); }
std::vector<const nn::Matrix*> net_refs(const nn::GradientSet& g) { return g.refs(); }

template <class P, class M>
std::vector<M*> collect(P& p) {
  std::vector<M*> out;
  for (auto& net : p.embed) {
    for (auto* r : net_refs(net)) out.push_back(r);
  }
  for (auto& net : p.head) {
    for (auto* r : net_refs(net)) out.push_back(r);
  }
  out.push_back(&p.key);
  out.push_back(&p.query);
  out.push_back(&p.value);
  return out;
}

}  // namespace

std::vector<nn::Matrix*> AttentionCritic::Params::refs() {
  return collect<Params, nn::Matrix>(*this);
}
std::vector<const nn::Matrix*> AttentionCritic::Params::refs() const {
  return collect<const Params, const nn::Matrix>(*this);
}
std::vector<nn::Matrix*> AttentionCritic::Gradients::refs() {
  return collect<Gradients, nn::Matrix>(*this);
}
std::vector<const nn::Matrix*> AttentionCritic::Gradients::refs() const {
  return collect<const Gradients, const nn::Matrix>(*this);
}

AttentionCritic::AttentionCritic(std::vector<std::size_t> observation_sizes,
                                 std::size_t action_size, const TrainConfig& config, Rng& rng)
    : observation_sizes_(std::move(observation_sizes)),
      action_size_(action_size),
      dim_(config.attention_dim) {
  if (observation_sizes_.size() < 2) {
    throw ArgumentError("AttentionCritic: attention needs at least two agents");
  }
  for (std::size_t obs : observation_sizes_) {
    live_.embed.push_back(
        nn::MlpNet::glorot({obs + action_size_, dim_}, nn::Activation::relu, rng));
  }
  for (std::size_t i = 0; i < observation_sizes_.size(); ++i) {
    live_.head.push_back(
        nn::MlpNet::glorot({2 * dim_, config.hidden_units, 1}, nn::Activation::relu, rng));
  }
  live_.key = glorot_square(dim_, rng);
  live_.query = glorot_square(dim_, rng);
  live_.value = glorot_square(dim_, rng);
  target_ = live_;
  optimizer_.learning_rate = config.lr_critic;
}

AttentionCritic::AttentionCritic(std::vector<std::size_t> observation_sizes,
                                 std::size_t action_size, Params params, double learning_rate)
    : observation_sizes_(std::move(observation_sizes)),
      action_size_(action_size),
      dim_(params.key.rows()),
      live_(std::move(params)) {
  const std::size_t n = observation_sizes_.size();
  if (n < 2) throw ArgumentError("AttentionCritic: attention needs at least two agents");
  if (live_.embed.size() != n || live_.head.size() != n) {
    throw ArgumentError("AttentionCritic: one embedding and one head per agent required");
  }
  for (const nn::Matrix* m : {&live_.key, &live_.query, &live_.value}) {
    if (m->rows() != dim_ || m->cols() != dim_) {
      throw DimensionError("AttentionCritic: key/query/value must be square");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (live_.embed[i].input_size() != observation_sizes_[i] + action_size_ ||
        live_.embed[i].output_size() != dim_ || live_.embed[i].num_layers() != 1) {
      throw DimensionError("AttentionCritic: embedding shape of agent " + std::to_string(i));
    }
    if (live_.head[i].input_size() != 2 * dim_ || live_.head[i].output_size() != 1) {
      throw DimensionError("AttentionCritic: head shape of agent " + std::to_string(i));
    }
  }
  target_ = live_;
  optimizer_.learning_rate = learning_rate;
}

void AttentionCritic::check_inputs(const std::vector<nn::Matrix>& observations,
                                   const std::vector<nn::Matrix>& actions) const {
  const std::size_t n = observation_sizes_.size();
  if (observations.size() != n || actions.size() != n) {
    throw DimensionError("AttentionCritic: expected inputs for every agent");
  }
  const std::size_t b = observations.front().cols();
  for (std::size_t j = 0; j < n; ++j) {
    if (observations[j].rows() != observation_sizes_[j] || observations[j].cols() != b ||
        actions[j].rows() != action_size_ || actions[j].cols() != b) {
      throw DimensionError("AttentionCritic: input shape of agent " + std::to_string(j));
    }
  }
}

std::vector<nn::Matrix> AttentionCritic::run(const Params& p,
                                             const std::vector<nn::Matrix>& observations,
                                             const std::vector<nn::Matrix>& actions, Cache* cache,
                                             Params* caching_params) const {
  check_inputs(observations, actions);
  const std::size_t n = observation_sizes_.size();
  const std::size_t b = observations.front().cols();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim_));

  Cache local;
  Cache& c = cache ? *cache : local;
  c = Cache{};
  c.batch = b;
  for (std::size_t j = 0; j < n; ++j) {
    const nn::Matrix in = nn::vstack(std::vector<nn::Matrix>{observations[j], actions[j]});
    nn::Matrix u = caching_params ? caching_params->embed[j].forward(in) : p.embed[j].evaluate(in);
    nn::Matrix e = apply_leaky(u);
    c.keys.push_back(nn::matmul(p.key, e));
    c.queries.push_back(nn::matmul(p.query, e));
    nn::Matrix pv = nn::matmul(p.value, e);
    c.values.push_back(apply_leaky(pv));
    c.pre_values.push_back(std::move(pv));
    c.pre_embed.push_back(std::move(u));
    c.embed.push_back(std::move(e));
  }

  std::vector<nn::Matrix> q_out;
  c.weights.assign(n, std::vector<nn::Matrix>(n));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<nn::Matrix>& w = c.weights[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      w[j] = nn::Matrix(1, b);
      for (std::size_t col = 0; col < b; ++col) {
        double s = 0.0;
        for (std::size_t r = 0; r < dim_; ++r) s += c.queries[i](r, col) * c.keys[j](r, col);
        w[j](0, col) = s * scale;
      }
    }
    for (std::size_t col = 0; col < b; ++col) {
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) mx = std::max(mx, w[j](0, col));
      }
      double z = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        w[j](0, col) = std::exp(w[j](0, col) - mx);
        z += w[j](0, col);
      }
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) w[j](0, col) /= z;
      }
    }
    nn::Matrix x(dim_, b);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      for (std::size_t r = 0; r < dim_; ++r) {
        for (std::size_t col = 0; col < b; ++col) x(r, col) += w[j](0, col) * c.values[j](r, col);
      }
    }
    const nn::Matrix h = nn::vstack(std::vector<nn::Matrix>{c.embed[i], x});
    q_out.push_back(caching_params ? caching_params->head[i].forward(h) : p.head[i].evaluate(h));
    c.context.push_back(std::move(x));
  }
  return q_out;
}

std::vector<nn::Matrix> AttentionCritic::q_values(const std::vector<nn::Matrix>& observations,
                                                  const std::vector<nn::Matrix>& actions,
                                                  bool use_target) const {
  return run(use_target ? target_ : live_, observations, actions, nullptr, nullptr);
}

std::vector<nn::Matrix> AttentionCritic::forward(const std::vector<nn::Matrix>& observations,
                                                 const std::vector<nn::Matrix>& actions) {
  return run(live_, observations, actions, &cache_, &live_);
}

AttentionCritic::Gradients AttentionCritic::backward(const std::vector<nn::Matrix>& dq,
                                                     std::vector<nn::Matrix>* d_actions) {
  const std::size_t n = observation_sizes_.size();
  const std::size_t b = cache_.batch;
  if (cache_.embed.size() != n) throw StateError("AttentionCritic: backward before forward");
  if (dq.size() != n) throw DimensionError("AttentionCritic: one output gradient per agent");
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim_));

  Gradients g;
  g.key = nn::Matrix(dim_, dim_);
  g.query = nn::Matrix(dim_, dim_);
  g.value = nn::Matrix(dim_, dim_);
  std::vector<nn::Matrix> d_embed(n, nn::Matrix(dim_, b));
  std::vector<nn::Matrix> d_keys(n, nn::Matrix(dim_, b));
  std::vector<nn::Matrix> d_queries(n, nn::Matrix(dim_, b));
  std::vector<nn::Matrix> d_values(n, nn::Matrix(dim_, b));

  for (std::size_t i = 0; i < n; ++i) {
    if (dq[i].rows() != 1 || dq[i].cols() != b) {
      throw DimensionError("AttentionCritic: output gradient shape of agent " + std::to_string(i));
    }
    nn::Matrix dh;
    g.head.push_back(live_.head[i].backward(dq[i], &dh));
    d_embed[i] += nn::row_block(dh, 0, dim_);
    const nn::Matrix dx = nn::row_block(dh, dim_, dim_);
    const auto& w = cache_.weights[i];

    // dL/dalpha_ij = dx . v_j; softmax backward gives dL/dscore_ij.
    std::vector<nn::Matrix> d_alpha(n);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      d_alpha[j] = nn::Matrix(1, b);
      for (std::size_t col = 0; col < b; ++col) {
        double s = 0.0;
        for (std::size_t r = 0; r < dim_; ++r) {
          s += dx(r, col) * cache_.values[j](r, col);
          d_values[j](r, col) += w[j](0, col) * dx(r, col);
        }
        d_alpha[j](0, col) = s;
      }
    }
    for (std::size_t col = 0; col < b; ++col) {
      double mean = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) mean += w[j](0, col) * d_alpha[j](0, col);
      }
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double ds = w[j](0, col) * (d_alpha[j](0, col) - mean) * scale;
        for (std::size_t r = 0; r < dim_; ++r) {
          d_queries[i](r, col) += ds * cache_.keys[j](r, col);
          d_keys[j](r, col) += ds * cache_.queries[i](r, col);
        }
      }
    }
  }

  for (std::size_t j = 0; j < n; ++j) {
    const nn::Matrix& e = cache_.embed[j];
    const nn::Matrix dpv = leaky_backward(d_values[j], cache_.pre_values[j]);
    g.value += nn::matmul_nt(dpv, e);
    d_embed[j] += nn::matmul_tn(live_.value, dpv);
    g.key += nn::matmul_nt(d_keys[j], e);
    d_embed[j] += nn::matmul_tn(live_.key, d_keys[j]);
    g.query += nn::matmul_nt(d_queries[j], e);
    d_embed[j] += nn::matmul_tn(live_.query, d_queries[j]);
  }

  if (d_actions) d_actions->clear();
  for (std::size_t j = 0; j < n; ++j) {
    const nn::Matrix du = leaky_backward(d_embed[j], cache_.pre_embed[j]);
    nn::Matrix din;
    g.embed.push_back(live_.embed[j].backward(du, d_actions ? &din : nullptr));
    if (d_actions) d_actions->push_back(nn::row_block(din, observation_sizes_[j], action_size_));
  }
  return g;
}

double AttentionCritic::update(const replay::Batch& batch,
                               const std::vector<nn::Matrix>& next_actions,
                               const TrainConfig& config) {
  const std::size_t n = observation_sizes_.size();
  const std::size_t b = batch.size();
  std::vector<nn::Matrix> q_next;
  if (config.critic_loss == CriticLoss::td) {
    q_next = run(target_, batch.next_observations, next_actions, nullptr, nullptr);
  }
  const std::vector<nn::Matrix> q = forward(batch.observations, batch.actions);
  std::vector<nn::Matrix> dq;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    nn::Matrix d(1, b);
    double loss = 0.0;
    for (std::size_t c = 0; c < b; ++c) {
      double y = batch.rewards[i](0, c);
      if (config.critic_loss == CriticLoss::td) {
        y += config.gamma * (1.0 - batch.done(0, c)) * q_next[i](0, c);
      }
      const double diff = q[i](0, c) - y;
      if (config.critic_loss == CriticLoss::td) {
        loss += diff * diff;
        d(0, c) = 2.0 * diff / static_cast<double>(b);
      } else {
        loss += std::abs(diff);
        d(0, c) = (diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0)) / static_cast<double>(b);
      }
    }
    total += loss / static_cast<double>(b);
    dq.push_back(std::move(d));
  }
  Gradients g = backward(dq);
  const auto grad_refs = g.refs();
  nn::clip_grad_norm(grad_refs, config.grad_clip);
  const auto param_refs = live_.refs();
  std::vector<const nn::Matrix*> const_grads(grad_refs.begin(), grad_refs.end());
  nn::adam_step(param_refs, const_grads, optimizer_);
  return total / static_cast<double>(n);
}

ActionGradient AttentionCritic::action_gradient(std::size_t agent,
                                                const std::vector<nn::Matrix>& observations,
                                                const std::vector<nn::Matrix>& actions) {
  const std::size_t n = observation_sizes_.size();
  if (agent >= n) throw ArgumentError("action_gradient: agent out of range");
  const std::vector<nn::Matrix> q = forward(observations, actions);
  const std::size_t b = q[agent].cols();
  std::vector<nn::Matrix> dq(n, nn::Matrix(1, b));
  dq[agent].fill(1.0);
  std::vector<nn::Matrix> d_actions;
  backward(dq, &d_actions);
  return ActionGradient{q[agent], std::move(d_actions[agent])};
}

void AttentionCritic::soft_update(double tau) {
  const auto live = live_.refs();
  const auto target = target_.refs();
  marl::soft_update(live, target, tau);
}

namespace {

nn::MlpNet square_as_net(const nn::Matrix& m) {
  nn::MlpNet net({m.cols(), m.rows()}, nn::Activation::relu);
  net.weights()[0] = m;
  return net;
}

void save_params(const AttentionCritic::Params& p, const std::filesystem::path& run_dir,
                 const std::string& suffix) {
  for (std::size_t i = 0; i < p.embed.size(); ++i) {
    const auto dir = run_dir / ("agent_" + std::to_string(i));
    nn::save_snapshot(p.embed[i], dir / ("critic_embed" + suffix + ".snap"));
    nn::save_snapshot(p.head[i], dir / ("critic" + suffix + ".snap"));
  }
  const auto shared = run_dir / "shared";
  nn::save_snapshot(square_as_net(p.key), shared / ("critic_key" + suffix + ".snap"));
  nn::save_snapshot(square_as_net(p.query), shared / ("critic_query" + suffix + ".snap"));
  nn::save_snapshot(square_as_net(p.value), shared / ("critic_value" + suffix + ".snap"));
}

}  // namespace

void AttentionCritic::save(const std::filesystem::path& run_dir) const {
  save_params(live_, run_dir, "");
  save_params(target_, run_dir, "_target");
}

std::unique_ptr<Critic> AttentionCritic::clone() const {
  return std::make_unique<AttentionCritic>(*this);
}

std::vector<std::vector<double>> AttentionCritic::embeddings(
    const std::vector<std::vector<double>>& observations,
    const std::vector<std::vector<double>>& actions) const {
  if (observations.size() != live_.embed.size() || actions.size() != live_.embed.size()) {
    throw DimensionError("AttentionCritic: expected inputs for every agent");
  }
  std::vector<std::vector<double>> out;
  for (std::size_t j = 0; j < observations.size(); ++j) {
    std::vector<double> in = observations[j];
    in.insert(in.end(), actions[j].begin(), actions[j].end());
    if (in.size() != live_.embed[j].input_size()) {
      throw DimensionError("AttentionCritic: input shape of agent " + std::to_string(j));
    }
    out.push_back(apply_leaky(live_.embed[j].evaluate(nn::Matrix::column(in))).column_values(0));
  }
  return out;
}

AttentionCritic::Context AttentionCritic::attention_context(
    const std::vector<std::vector<double>>& embeddings, std::size_t agent) const {
  const std::size_t n = embeddings.size();
  if (agent >= n) throw ArgumentError("attention_context: agent out of range");
  if (n < 2) throw ArgumentError("attention_context: needs at least two agents");
  for (const auto& e : embeddings) {
    if (e.size() != dim_) throw DimensionError("attention_context: embedding width");
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim_));
  const nn::Matrix q = nn::matmul(live_.query, nn::Matrix::column(embeddings[agent]));
  std::vector<double> scores;
  std::vector<std::vector<double>> values;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == agent) continue;
    const nn::Matrix e = nn::Matrix::column(embeddings[j]);
    const nn::Matrix k = nn::matmul(live_.key, e);
    double s = 0.0;
    for (std::size_t r = 0; r < dim_; ++r) s += q(r, 0) * k(r, 0);
    scores.push_back(s * scale);
    values.push_back(apply_leaky(nn::matmul(live_.value, e)).column_values(0));
  }
  double mx = scores.front();
  for (double s : scores) mx = std::max(mx, s);
  double z = 0.0;
  for (double& s : scores) z += (s = std::exp(s - mx));
  Context ctx;
  ctx.x.assign(dim_, 0.0);
  for (std::size_t k = 0; k < scores.size(); ++k) {
    const double w = scores[k] / z;
    ctx.weights.push_back(w);
    for (std::size_t r = 0; r < dim_; ++r) ctx.x[r] += w * values[k][r];
  }
  return ctx;
}

double AttentionCritic::attention_q(const std::vector<std::vector<double>>& observations,
                                    const std::vector<std::vector<double>>& actions,
                                    std::size_t agent) const {
  const auto e = embeddings(observations, actions);
  const Context ctx = attention_context(e, agent);
  std::vector<double> h = e[agent];
  h.insert(h.end(), ctx.x.begin(), ctx.x.end());
  return live_.head[agent].evaluate(nn::Matrix::column(h))(0, 0);
}

}  // namespace distil::marl
