#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "distil/env/scenario.hpp"
#include "distil/rng.hpp"

namespace distil::env {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
  friend bool operator==(Vec2, Vec2) = default;
  double norm() const { return std::sqrt(x * x + y * y); }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

/// Five action logits: no-op, +x, -x, +y, -y.
struct AgentAction {
  std::array<double, kActionSize> logits{};
};

/// Complete simulator state. A value: copying it forks the episode, including
/// the generator used for treasure respawns.
struct WorldState {
  ScenarioSpec spec;
  std::vector<Role> roles;
  std::vector<Vec2> agent_pos;
  std::vector<Vec2> agent_vel;
  std::vector<Vec2> landmark_pos;
  std::size_t target = 0;  // adversary: index of the correct landmark

  // treasure: bank b is agent n_collectors + b and has color b.
  std::vector<Vec2> treasure_pos;
  std::vector<int> treasure_color;
  std::vector<int> treasure_carrier;  // agent index of the carrier, -1 when free

  std::size_t step_count = 0;
  Rng rng;

  std::size_t agent_count() const { return agent_pos.size(); }
  std::size_t entity_count() const {
    return agent_pos.size() + landmark_pos.size() + treasure_pos.size();
  }
  bool carrying(std::size_t collector) const;
  std::size_t bank_agent(int color) const { return spec.n_collectors + static_cast<std::size_t>(color); }
};

struct StepResult {
  std::vector<double> rewards;
  bool done = false;
};

/// Places every entity uniformly in the world square, zero velocities.
WorldState reset(const ScenarioSpec& spec, std::uint64_t rng_seed);

/// Applies one action per agent, integrates, scores, and (treasure) resolves
/// pickups and deposits.
StepResult step(WorldState& state, std::span<const AgentAction> actions);

/// Net force direction of an action: (p(+x) - p(-x), p(+y) - p(-y)).
Vec2 action_direction(const AgentAction& action);

// Reward functions. Each is pure in the state and throws StateError when
// applied to another scenario kind.
std::vector<double> reward_spread(const WorldState& state);
std::vector<double> reward_adversary(const WorldState& state);
std::vector<double> reward_treasure(const WorldState& state);
std::vector<double> reward(const WorldState& state);

struct TreasureEvents {
  std::vector<std::pair<std::size_t, std::size_t>> pickups;  // (collector, treasure)
  std::vector<std::size_t> deposits;                          // treasure indices
};

/// Pickups and deposits implied by the current contacts.
TreasureEvents detect_treasure_events(const WorldState& state);
/// Applies detected events; deposited treasures respawn from the state generator.
void apply_treasure_events(WorldState& state, const TreasureEvents& events);

/// Whether two agents overlap (distance < sum of radii).
bool agents_collide(const WorldState& state, std::size_t i, std::size_t j);

// Observations ---------------------------------------------------------------

/// A named run of `count` entity records, each `width` numbers wide.
struct ObservationSegment {
  std::string name;
  std::size_t count = 0;
  std::size_t width = 0;
  std::size_t size() const { return count * width; }
  friend bool operator==(const ObservationSegment&, const ObservationSegment&) = default;
};

struct ObservationLayout {
  std::vector<ObservationSegment> segments;
  std::size_t size() const;
  /// Index of the segment with this name, or -1.
  std::ptrdiff_t find(const std::string& name) const;
  std::size_t offset(std::size_t segment) const;
  friend bool operator==(const ObservationLayout&, const ObservationLayout&) = default;
};

/// Layout of the observation of agent `agent_index` for `spec`.
///
///   spread   agent      self[vel,pos] landmarks[rel]xL agents[rel]x(N-1)
///   adversary good      self landmarks goal[rel] good[rel]x(G-1) adversaries[rel]xA
///   adversary adversary self landmarks good[rel]xG adversaries[rel]x(A-1)
///   treasure collector  self holding[flag,color..] treasures[rel,carried,color..]xC
///                       banks[rel]xB collectors[rel,carrying]x(C-1)
///   treasure bank       self bank_color[color..] treasures banks collectors x C
///
/// Landmarks, agents, treasures and collectors are listed nearest first
/// (ties broken by index); banks and goal are in fixed order.
ObservationLayout observation_layout(const ScenarioSpec& spec, std::size_t agent_index);

std::vector<double> observe(const WorldState& state, std::size_t agent_index);

/// Trajectory CSV rows (step,entity_id,x,y,vx,vy,reward) for the current state.
std::string trajectory_rows(const WorldState& state, std::span<const double> rewards);
inline constexpr const char* kTrajectoryHeader = "step,entity_id,x,y,vx,vy,reward";

}  // namespace distil::env
