#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace distil::env {

enum class ScenarioKind { spread, adversary, treasure };

std::string to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from_string(const std::string& name);

/// Role of an acting agent. Agents are ordered by role: spread has only
/// `agent`; adversary lists good agents then adversaries; treasure lists
/// collectors then banks.
enum class Role { agent, good, adversary, collector, bank };

std::string to_string(Role role);
Role role_from_string(const std::string& name);

/// Entity counts and episode settings of one particle-world task.
struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::spread;
  std::size_t n_agents = 3;       // spread agents or adversary good agents
  std::size_t n_adversaries = 0;  // adversary only
  std::size_t n_landmarks = 3;    // spread / adversary
  std::size_t n_collectors = 0;   // treasure only; also the treasure count
  std::size_t n_banks = 0;        // treasure only; one bank per color
  std::size_t episode_length = 25;
  double world_half_width = 1.0;
  std::uint64_t seed = 0;

  static ScenarioSpec spread(std::size_t agents, std::size_t landmarks);
  static ScenarioSpec adversary(std::size_t good, std::size_t adversaries);
  static ScenarioSpec treasure(std::size_t collectors, std::size_t banks);

  /// Throws ConfigError when the counts are inconsistent.
  void validate() const;

  std::size_t agent_count() const;
  std::size_t treasure_count() const { return kind == ScenarioKind::treasure ? n_collectors : 0; }
  std::vector<Role> roles() const;
  std::string describe() const;

  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

/// Fixed world constants shared by every scenario.
struct Physics {
  double dt = 0.1;
  double damping = 0.25;
  double force_gain = 5.0;
  double max_speed = 1.0;
  double agent_radius = 0.1;
  double landmark_radius = 0.05;
  double treasure_radius = 0.05;
  double collect_bonus = 5.0;
  double deposit_bonus = 10.0;
  double collision_penalty = 1.0;
};

inline constexpr Physics kPhysics{};

inline constexpr std::size_t kActionSize = 5;  // no-op, +x, -x, +y, -y

}  // namespace distil::env
