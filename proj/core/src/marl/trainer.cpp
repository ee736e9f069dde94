#include "distil/marl/trainer.hpp"

#include <numeric>

#include "distil/errors.hpp"
#include "distil/marl/attention_critic.hpp"
#include "distil/marl/centralized_critic.hpp"
#include "distil/nn/snapshot.hpp"

namespace distil::marl {

namespace {

constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kActionStream = 2;
constexpr std::uint64_t kEpisodeStream = 3;
constexpr std::uint64_t kEvalStream = 4;

std::vector<std::size_t> sizes_for(const env::ScenarioSpec& spec) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < spec.agent_count(); ++i) {
    out.push_back(env::observation_layout(spec, i).size());
  }
  return out;
}

}  // namespace

double EpisodeStats::team_reward() const {
  if (mean_reward.empty()) return 0.0;
  return std::accumulate(mean_reward.begin(), mean_reward.end(), 0.0) /
         static_cast<double>(mean_reward.size());
}

std::vector<std::size_t> actor_layers(std::size_t observation_size, const TrainConfig& config) {
  std::vector<std::size_t> sizes{observation_size};
  sizes.insert(sizes.end(), config.hidden_layers, config.hidden_units);
  sizes.push_back(env::kActionSize);
  return sizes;
}

Trainer::Trainer(env::ScenarioSpec spec, Algorithm algorithm, TrainConfig config,
                 std::uint64_t seed, std::optional<reuse::TransferContext> transfer)
    : spec_(std::move(spec)),
      algorithm_(algorithm),
      config_(std::move(config)),
      observation_sizes_((spec_.validate(), sizes_for(spec_))),
      buffer_(replay::TransitionDims{observation_sizes_, env::kActionSize},
              config_.buffer_capacity, seed),
      transfer_(std::move(transfer)),
      action_rng_(make_rng(seed, kActionStream)),
      episode_rng_(make_rng(seed, kEpisodeStream)),
      noise_(config_.noise_scale) {
  config_.validate();
  Rng init = make_rng(seed, kInitStream);
  for (std::size_t size : observation_sizes_) {
    ActorNets a;
    a.actor = nn::MlpNet::glorot(actor_layers(size, config_), nn::Activation::relu, init);
    a.target_actor = a.actor;
    a.optimizer.learning_rate = config_.lr_actor;
    actors_.push_back(std::move(a));
  }
  if (algorithm_ == Algorithm::maddpg) {
    critic_ = std::make_unique<CentralizedCritic>(observation_sizes_, env::kActionSize, config_,
                                                  init);
  } else {
    critic_ = std::make_unique<AttentionCritic>(observation_sizes_, env::kActionSize, config_,
                                                init);
  }
  if (transfer_) {
    if (transfer_->adapters.size() != actors_.size() ||
        transfer_->scalers.size() != actors_.size()) {
      throw ConfigError("transfer context does not cover every agent");
    }
    for (std::size_t i = 0; i < actors_.size(); ++i) {
      if (transfer_->adapters[i].student_size() != observation_sizes_[i] ||
          transfer_->adapters[i].teacher_size() != transfer_->teacher_of(i).input_size()) {
        throw ConfigError("transfer adapter of agent " + std::to_string(i) +
                          " does not fit its student and teacher");
      }
    }
  }
}

std::vector<std::vector<double>> Trainer::observe_all(const env::WorldState& state) const {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < actors_.size(); ++i) out.push_back(env::observe(state, i));
  return out;
}

EpisodeStats Trainer::train_episode() {
  EpisodeStats stats;
  stats.episode = episodes_done_;
  stats.alpha = transfer_ ? transfer_->schedule.alpha() : 0.0;
  stats.noise = noise_;
  stats.mean_reward.assign(actors_.size(), 0.0);

  env::WorldState state = env::reset(spec_, episode_rng_());
  auto obs = observe_all(state);
  std::vector<env::AgentAction> actions(actors_.size());
  for (std::size_t t = 0; t < spec_.episode_length; ++t) {
    for (std::size_t i = 0; i < actors_.size(); ++i) {
      actions[i] = select_action(actors_[i].actor, obs[i], noise_, action_rng_);
    }
    const env::StepResult result = env::step(state, actions);
    auto next_obs = observe_all(state);
    replay::Transition tr;
    tr.observations = obs;
    for (const auto& a : actions) tr.actions.emplace_back(a.logits.begin(), a.logits.end());
    tr.rewards = result.rewards;
    tr.next_observations = next_obs;
    // Episodes only end at the time limit, which the observation cannot see,
    // so the last step still bootstraps.
    tr.done = false;
    buffer_.push(std::move(tr));
    for (std::size_t i = 0; i < actors_.size(); ++i) stats.mean_reward[i] += result.rewards[i];
    obs = std::move(next_obs);
  }
  for (double& r : stats.mean_reward) r /= static_cast<double>(spec_.episode_length);

  ++episodes_done_;
  if (episodes_done_ % config_.update_every == 0 && buffer_.ready(config_.sample_size)) {
    for (std::size_t r = 0; r < config_.updates_per_round; ++r) update_round(stats);
  }
  if (stats.updates > 0) {
    const double n = static_cast<double>(stats.updates * actors_.size());
    stats.q_loss /= n;
    stats.reuse_loss /= n;
    stats.scaled_reuse_loss /= n;
    stats.critic_loss /= static_cast<double>(stats.updates);
  }
  if (transfer_) transfer_->schedule.step();
  noise_ = std::max(config_.noise_floor, noise_ * config_.noise_decay);
  return stats;
}

void Trainer::update_round(EpisodeStats& stats) {
  const std::vector<replay::Transition> sample = buffer_.sample(config_.sample_size);
  const double alpha = transfer_ ? transfer_->schedule.alpha() : 0.0;
  for (std::size_t first = 0; first < sample.size(); first += config_.minibatch_size) {
    const std::size_t count = std::min(config_.minibatch_size, sample.size() - first);
    const replay::Batch batch =
        replay::make_batch(std::span<const replay::Transition>(sample).subspan(first, count));

    std::vector<nn::Matrix> next_actions;
    for (std::size_t i = 0; i < actors_.size(); ++i) {
      next_actions.push_back(actors_[i].target_actor.evaluate(batch.next_observations[i]));
    }
    stats.critic_loss += critic_->update(batch, next_actions, config_);

    for (std::size_t i = 0; i < actors_.size(); ++i) {
      const ActorUpdate u = update_actor(i, batch, alpha);
      stats.q_loss += u.q_loss;
      stats.reuse_loss += u.reuse_loss;
      stats.scaled_reuse_loss += u.scaled_reuse_loss;
    }
    for (auto& a : actors_) soft_update(a.actor, a.target_actor, config_.tau);
    critic_->soft_update(config_.tau);
    ++stats.updates;
  }
}

Trainer::ActorUpdate Trainer::update_actor(std::size_t agent, const replay::Batch& batch,
                                           double alpha) {
  ActorNets& nets = actors_[agent];
  const nn::Matrix& obs = batch.observations[agent];
  const std::size_t b = obs.cols();
  const double inv_b = 1.0 / static_cast<double>(b);

  const nn::Matrix logits = nets.actor.forward(obs);
  std::vector<nn::Matrix> actions = batch.actions;
  actions[agent] = logits;
  const ActionGradient ag = critic_->action_gradient(agent, batch.observations, actions);

  ActorUpdate out;
  out.q_loss = -ag.q.sum() * inv_b;
  nn::Matrix grad = ag.d_action;
  grad *= -inv_b;

  if (transfer_ && alpha > 0.0) {
    const reuse::TeacherSnapshot& teacher = transfer_->teacher_of(agent);
    const nn::Matrix teacher_logits =
        teacher.actor().evaluate(transfer_->adapters[agent].adapt(obs));
    nn::LossResult r = reuse::reuse_loss_from_logits(logits, teacher_logits, transfer_->loss,
                                                     transfer_->temperature);
    const double s = transfer_->scalers[agent].factor(r.value, out.q_loss);
    out.reuse_loss = r.value;
    out.scaled_reuse_loss = s * r.value;
    grad *= 1.0 - alpha;
    r.grad *= alpha * s;
    grad += r.grad;
  }

  if (config_.logit_l2 > 0.0) {
    const double k = 2.0 * config_.logit_l2 / static_cast<double>(logits.size());
    auto g = grad.values();
    const auto z = logits.values();
    for (std::size_t j = 0; j < g.size(); ++j) g[j] += k * z[j];
  }

  nn::GradientSet grads = nets.actor.backward(grad);
  const auto refs = grads.refs();
  nn::clip_grad_norm(refs, config_.grad_clip);
  nn::adam_step(nets.actor, grads, nets.optimizer);
  return out;
}

double Trainer::evaluate(std::size_t episodes, std::uint64_t seed) const {
  if (episodes == 0) throw ArgumentError("evaluate: episodes must be positive");
  Rng episode_rng = make_rng(seed, kEvalStream);
  Rng unused = make_rng(seed, kEvalStream + 1);
  double total = 0.0;
  std::vector<env::AgentAction> actions(actors_.size());
  for (std::size_t e = 0; e < episodes; ++e) {
    env::WorldState state = env::reset(spec_, episode_rng());
    for (std::size_t t = 0; t < spec_.episode_length; ++t) {
      for (std::size_t i = 0; i < actors_.size(); ++i) {
        actions[i] = select_action(actors_[i].actor, env::observe(state, i), 0.0, unused);
      }
      const env::StepResult result = env::step(state, actions);
      total += std::accumulate(result.rewards.begin(), result.rewards.end(), 0.0) /
               static_cast<double>(actors_.size());
    }
  }
  return total / static_cast<double>(episodes * spec_.episode_length);
}

void Trainer::save(const std::filesystem::path& run_dir) const {
  for (std::size_t i = 0; i < actors_.size(); ++i) {
    const auto dir = run_dir / ("agent_" + std::to_string(i));
    nn::save_snapshot(actors_[i].actor, dir / "actor.snap");
    nn::save_snapshot(actors_[i].target_actor, dir / "actor_target.snap");
  }
  critic_->save(run_dir);
}

}  // namespace distil::marl
