#include <algorithm>
#include <numeric>

#include "distil/env/world.hpp"
#include "distil/errors.hpp"

namespace distil::env {

std::size_t ObservationLayout::size() const {
  std::size_t n = 0;
  for (const auto& s : segments) n += s.size();
  return n;
}

std::ptrdiff_t ObservationLayout::find(const std::string& name) const {
  for (std::size_t k = 0; k < segments.size(); ++k)
    if (segments[k].name == name) return static_cast<std::ptrdiff_t>(k);
  return -1;
}

std::size_t ObservationLayout::offset(std::size_t segment) const {
  std::size_t n = 0;
  for (std::size_t k = 0; k < segment; ++k) n += segments[k].size();
  return n;
}

ObservationLayout observation_layout(const ScenarioSpec& spec, std::size_t agent_index) {
  spec.validate();
  if (agent_index >= spec.agent_count()) {
    throw ArgumentError("observation_layout: agent index " + std::to_string(agent_index) +
                        " out of range");
  }
  ObservationLayout layout;
  auto add = [&](std::string name, std::size_t count, std::size_t width) {
    layout.segments.push_back({std::move(name), count, width});
  };
  add("self", 1, 4);
  const Role role = spec.roles()[agent_index];
  switch (spec.kind) {
    case ScenarioKind::spread:
      add("landmarks", spec.n_landmarks, 2);
      add("agents", spec.n_agents - 1, 2);
      break;
    case ScenarioKind::adversary:
      add("landmarks", spec.n_landmarks, 2);
      if (role == Role::good) {
        add("goal", 1, 2);
        add("good", spec.n_agents - 1, 2);
        add("adversaries", spec.n_adversaries, 2);
      } else {
        add("good", spec.n_agents, 2);
        add("adversaries", spec.n_adversaries - 1, 2);
      }
      break;
    case ScenarioKind::treasure: {
      const std::size_t banks = spec.n_banks;
      if (role == Role::collector) {
        add("holding", 1, 1 + banks);
      } else {
        add("bank_color", 1, banks);
      }
      add("treasures", spec.n_collectors, 3 + banks);
      add("banks", banks, 2);
      add("collectors", role == Role::collector ? spec.n_collectors - 1 : spec.n_collectors, 3);
      break;
    }
  }
  return layout;
}

namespace {

/// Indices of `candidates` ordered by distance from `origin`, ties by index.
std::vector<std::size_t> nearest_first(Vec2 origin, const std::vector<Vec2>& positions,
                                       std::vector<std::size_t> candidates) {
  std::vector<double> d(positions.size());
  for (std::size_t c : candidates) d[c] = distance(origin, positions[c]);
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  return candidates;
}

std::vector<std::size_t> index_range(std::size_t first, std::size_t last, std::size_t skip) {
  std::vector<std::size_t> out;
  for (std::size_t i = first; i < last; ++i)
    if (i != skip) out.push_back(i);
  return out;
}

void push_rel(std::vector<double>& out, Vec2 target, Vec2 origin) {
  const Vec2 r = target - origin;
  out.push_back(r.x);
  out.push_back(r.y);
}

void push_one_hot(std::vector<double>& out, int hot, std::size_t width) {
  for (std::size_t k = 0; k < width; ++k) out.push_back(static_cast<int>(k) == hot ? 1.0 : 0.0);
}

}  // namespace

std::vector<double> observe(const WorldState& state, std::size_t agent_index) {
  const ScenarioSpec& spec = state.spec;
  const std::size_t n = state.agent_count();
  if (agent_index >= n) {
    throw ArgumentError("observe: agent index " + std::to_string(agent_index) + " out of range");
  }
  const Vec2 me = state.agent_pos[agent_index];
  const Role role = state.roles[agent_index];
  const auto none = static_cast<std::size_t>(-1);

  std::vector<double> out;
  out.push_back(state.agent_vel[agent_index].x);
  out.push_back(state.agent_vel[agent_index].y);
  out.push_back(me.x);
  out.push_back(me.y);

  auto push_agents = [&](std::size_t first, std::size_t last) {
    for (std::size_t j : nearest_first(me, state.agent_pos, index_range(first, last, agent_index))) {
      push_rel(out, state.agent_pos[j], me);
    }
  };
  auto push_landmarks = [&] {
    for (std::size_t l : nearest_first(me, state.landmark_pos,
                                       index_range(0, state.landmark_pos.size(), none))) {
      push_rel(out, state.landmark_pos[l], me);
    }
  };

  switch (spec.kind) {
    case ScenarioKind::spread:
      push_landmarks();
      push_agents(0, n);
      break;
    case ScenarioKind::adversary:
      push_landmarks();
      if (role == Role::good) push_rel(out, state.landmark_pos[state.target], me);
      push_agents(0, spec.n_agents);
      push_agents(spec.n_agents, n);
      break;
    case ScenarioKind::treasure: {
      const std::size_t banks = spec.n_banks;
      const std::size_t collectors = spec.n_collectors;
      if (role == Role::collector) {
        int held = -1;
        for (std::size_t t = 0; t < state.treasure_pos.size(); ++t)
          if (state.treasure_carrier[t] == static_cast<int>(agent_index)) held = state.treasure_color[t];
        out.push_back(held >= 0 ? 1.0 : 0.0);
        push_one_hot(out, held, banks);
      } else {
        push_one_hot(out, static_cast<int>(agent_index - collectors), banks);
      }
      for (std::size_t t : nearest_first(me, state.treasure_pos,
                                         index_range(0, state.treasure_pos.size(), none))) {
        push_rel(out, state.treasure_pos[t], me);
        out.push_back(state.treasure_carrier[t] >= 0 ? 1.0 : 0.0);
        push_one_hot(out, state.treasure_color[t], banks);
      }
      for (std::size_t b = 0; b < banks; ++b) push_rel(out, state.agent_pos[collectors + b], me);
      for (std::size_t c :
           nearest_first(me, state.agent_pos, index_range(0, collectors, agent_index))) {
        push_rel(out, state.agent_pos[c], me);
        out.push_back(state.carrying(c) ? 1.0 : 0.0);
      }
      break;
    }
  }
  return out;
}

}  // namespace distil::env
