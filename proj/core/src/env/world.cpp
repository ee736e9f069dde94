#include "distil/env/world.hpp"

#include <algorithm>
#include <sstream>

#include "distil/errors.hpp"
#include "distil/nn/losses.hpp"
#include "distil/nn/snapshot.hpp"

namespace distil::env {

bool WorldState::carrying(std::size_t collector) const {
  return std::find(treasure_carrier.begin(), treasure_carrier.end(),
                   static_cast<int>(collector)) != treasure_carrier.end();
}

WorldState reset(const ScenarioSpec& spec, std::uint64_t rng_seed) {
  spec.validate();
  WorldState s;
  s.spec = spec;
  s.roles = spec.roles();
  s.rng = make_rng(rng_seed, 0x5eed0000ULL + spec.seed);
  const double w = spec.world_half_width;
  std::uniform_real_distribution<double> coord(-w, w);
  auto sample = [&] {
    const double x = coord(s.rng);
    const double y = coord(s.rng);
    return Vec2{x, y};
  };

  const std::size_t n = spec.agent_count();
  s.agent_vel.assign(n, Vec2{});
  for (std::size_t i = 0; i < n; ++i) s.agent_pos.push_back(sample());
  for (std::size_t l = 0; l < spec.n_landmarks; ++l) s.landmark_pos.push_back(sample());
  if (spec.kind == ScenarioKind::adversary) {
    std::uniform_int_distribution<std::size_t> pick(0, spec.n_landmarks - 1);
    s.target = pick(s.rng);
  }
  if (spec.kind == ScenarioKind::treasure) {
    std::uniform_int_distribution<int> color(0, static_cast<int>(spec.n_banks) - 1);
    for (std::size_t t = 0; t < spec.n_collectors; ++t) {
      s.treasure_pos.push_back(sample());
      s.treasure_color.push_back(color(s.rng));
      s.treasure_carrier.push_back(-1);
    }
  }
  return s;
}

Vec2 action_direction(const AgentAction& action) {
  const auto p = nn::softmax_t(action.logits, 1.0);
  return {p[1] - p[2], p[3] - p[4]};
}

StepResult step(WorldState& state, std::span<const AgentAction> actions) {
  const std::size_t n = state.agent_count();
  if (actions.size() != n) {
    throw ArgumentError("step: expected " + std::to_string(n) + " actions, got " +
                        std::to_string(actions.size()));
  }
  const Physics& ph = kPhysics;
  const double w = state.spec.world_half_width;
  for (std::size_t i = 0; i < n; ++i) {
    for (double z : actions[i].logits) {
      if (!std::isfinite(z)) throw ArgumentError("step: non-finite action logit");
    }
    const Vec2 force = action_direction(actions[i]) * ph.force_gain;
    Vec2 v = state.agent_vel[i] * (1.0 - ph.damping) + force * ph.dt;
    const double speed = v.norm();
    if (speed > ph.max_speed) v = v * (ph.max_speed / speed);
    Vec2 p = state.agent_pos[i] + v * ph.dt;
    if (p.x > w || p.x < -w) {
      p.x = std::clamp(p.x, -w, w);
      v.x = 0.0;
    }
    if (p.y > w || p.y < -w) {
      p.y = std::clamp(p.y, -w, w);
      v.y = 0.0;
    }
    state.agent_pos[i] = p;
    state.agent_vel[i] = v;
  }
  for (std::size_t t = 0; t < state.treasure_pos.size(); ++t) {
    const int carrier = state.treasure_carrier[t];
    if (carrier >= 0) state.treasure_pos[t] = state.agent_pos[static_cast<std::size_t>(carrier)];
  }

  StepResult result;
  result.rewards = reward(state);
  if (state.spec.kind == ScenarioKind::treasure) {
    apply_treasure_events(state, detect_treasure_events(state));
  }
  ++state.step_count;
  result.done = state.step_count >= state.spec.episode_length;
  return result;
}

std::string trajectory_rows(const WorldState& state, std::span<const double> rewards) {
  std::ostringstream out;
  std::size_t id = 0;
  auto row = [&](Vec2 p, Vec2 v, double r) {
    out << state.step_count << ',' << id++ << ',' << nn::format_real(p.x) << ','
        << nn::format_real(p.y) << ',' << nn::format_real(v.x) << ',' << nn::format_real(v.y)
        << ',' << nn::format_real(r) << '\n';
  };
  for (std::size_t i = 0; i < state.agent_count(); ++i) {
    row(state.agent_pos[i], state.agent_vel[i], i < rewards.size() ? rewards[i] : 0.0);
  }
  for (Vec2 p : state.landmark_pos) row(p, {}, 0.0);
  for (Vec2 p : state.treasure_pos) row(p, {}, 0.0);
  return out.str();
}

}  // namespace distil::env
