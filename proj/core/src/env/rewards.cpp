#include "distil/env/world.hpp"

#include <algorithm>
#include <limits>

#include "distil/errors.hpp"

namespace distil::env {

namespace {

void require_kind(const WorldState& state, ScenarioKind kind, const char* fn) {
  if (state.spec.kind != kind) {
    throw StateError(std::string(fn) + " called on a " + to_string(state.spec.kind) + " scenario");
  }
}

double nearest(Vec2 point, std::span<const Vec2> candidates) {
  double best = std::numeric_limits<double>::infinity();
  for (Vec2 c : candidates) best = std::min(best, distance(point, c));
  return best;
}

void add_collision_penalties(const WorldState& state, std::size_t first, std::size_t count,
                             std::vector<double>& rewards) {
  for (std::size_t i = first; i < first + count; ++i)
    for (std::size_t j = i + 1; j < first + count; ++j)
      if (agents_collide(state, i, j)) {
        rewards[i] -= kPhysics.collision_penalty;
        rewards[j] -= kPhysics.collision_penalty;
      }
}

}  // namespace

bool agents_collide(const WorldState& state, std::size_t i, std::size_t j) {
  return distance(state.agent_pos[i], state.agent_pos[j]) < 2.0 * kPhysics.agent_radius;
}

std::vector<double> reward_spread(const WorldState& state) {
  require_kind(state, ScenarioKind::spread, "reward_spread");
  double shared = 0.0;
  for (Vec2 l : state.landmark_pos) shared -= nearest(l, state.agent_pos);
  std::vector<double> rewards(state.agent_count(), shared);
  add_collision_penalties(state, 0, state.agent_count(), rewards);
  return rewards;
}

std::vector<double> reward_adversary(const WorldState& state) {
  require_kind(state, ScenarioKind::adversary, "reward_adversary");
  const std::size_t good = state.spec.n_agents;
  const Vec2 goal = state.landmark_pos[state.target];
  const std::span<const Vec2> all(state.agent_pos);
  const double good_dist = nearest(goal, all.subspan(0, good));
  const double adv_dist = nearest(goal, all.subspan(good));
  std::vector<double> rewards(state.agent_count());
  for (std::size_t i = 0; i < good; ++i) rewards[i] = -good_dist + adv_dist;
  for (std::size_t i = good; i < state.agent_count(); ++i) {
    rewards[i] = -distance(state.agent_pos[i], goal);
  }
  return rewards;
}

TreasureEvents detect_treasure_events(const WorldState& state) {
  require_kind(state, ScenarioKind::treasure, "detect_treasure_events");
  const std::size_t collectors = state.spec.n_collectors;
  const double pickup_range = kPhysics.agent_radius + kPhysics.treasure_radius;
  const double deposit_range = 2.0 * kPhysics.agent_radius;

  TreasureEvents events;
  std::vector<bool> busy(collectors);
  for (std::size_t c = 0; c < collectors; ++c) busy[c] = state.carrying(c);
  for (std::size_t t = 0; t < state.treasure_pos.size(); ++t) {
    const int carrier = state.treasure_carrier[t];
    if (carrier >= 0) {
      const std::size_t bank = state.bank_agent(state.treasure_color[t]);
      if (distance(state.agent_pos[static_cast<std::size_t>(carrier)], state.agent_pos[bank]) <
          deposit_range) {
        events.deposits.push_back(t);
      }
      continue;
    }
    for (std::size_t c = 0; c < collectors; ++c) {
      if (!busy[c] && distance(state.agent_pos[c], state.treasure_pos[t]) < pickup_range) {
        events.pickups.emplace_back(c, t);
        busy[c] = true;
        break;
      }
    }
  }
  return events;
}

void apply_treasure_events(WorldState& state, const TreasureEvents& events) {
  for (auto [collector, t] : events.pickups) {
    state.treasure_carrier[t] = static_cast<int>(collector);
    state.treasure_pos[t] = state.agent_pos[collector];
  }
  const double w = state.spec.world_half_width;
  std::uniform_real_distribution<double> coord(-w, w);
  std::uniform_int_distribution<int> color(0, static_cast<int>(state.spec.n_banks) - 1);
  for (std::size_t t : events.deposits) {
    state.treasure_carrier[t] = -1;
    const double x = coord(state.rng);
    const double y = coord(state.rng);
    state.treasure_pos[t] = {x, y};
    state.treasure_color[t] = color(state.rng);
  }
}

std::vector<double> reward_treasure(const WorldState& state) {
  require_kind(state, ScenarioKind::treasure, "reward_treasure");
  const std::size_t collectors = state.spec.n_collectors;
  const std::span<const Vec2> collector_pos(state.agent_pos.data(), collectors);

  double shared = 0.0;
  for (std::size_t t = 0; t < state.treasure_pos.size(); ++t) {
    if (state.treasure_carrier[t] < 0) {
      shared -= nearest(state.treasure_pos[t], collector_pos);
    } else {
      shared -= distance(state.treasure_pos[t],
                         state.agent_pos[state.bank_agent(state.treasure_color[t])]);
    }
  }
  const TreasureEvents events = detect_treasure_events(state);
  shared += kPhysics.collect_bonus * static_cast<double>(events.pickups.size());
  shared += kPhysics.deposit_bonus * static_cast<double>(events.deposits.size());

  std::vector<double> rewards(state.agent_count(), shared);
  add_collision_penalties(state, 0, collectors, rewards);
  return rewards;
}

std::vector<double> reward(const WorldState& state) {
  switch (state.spec.kind) {
    case ScenarioKind::spread: return reward_spread(state);
    case ScenarioKind::adversary: return reward_adversary(state);
    case ScenarioKind::treasure: return reward_treasure(state);
  }
  return {};
}

}  // namespace distil::env
