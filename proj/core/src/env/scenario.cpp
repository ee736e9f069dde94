#include "distil/env/scenario.hpp"

#include <sstream>

#include "distil/errors.hpp"

namespace distil::env {

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::spread: return "spread";
    case ScenarioKind::adversary: return "adversary";
    case ScenarioKind::treasure: return "treasure";
  }
  return "?";
}

ScenarioKind scenario_kind_from_string(const std::string& name) {
  if (name == "spread") return ScenarioKind::spread;
  if (name == "adversary") return ScenarioKind::adversary;
  if (name == "treasure") return ScenarioKind::treasure;
  throw ConfigError("unknown scenario kind '" + name + "'");
}

std::string to_string(Role role) {
  switch (role) {
    case Role::agent: return "agent";
    case Role::good: return "good";
    case Role::adversary: return "adversary";
    case Role::collector: return "collector";
    case Role::bank: return "bank";
  }
  return "?";
}

Role role_from_string(const std::string& name) {
  if (name == "agent") return Role::agent;
  if (name == "good") return Role::good;
  if (name == "adversary") return Role::adversary;
  if (name == "collector") return Role::collector;
  if (name == "bank") return Role::bank;
  throw ConfigError("unknown role '" + name + "'");
}

ScenarioSpec ScenarioSpec::spread(std::size_t agents, std::size_t landmarks) {
  ScenarioSpec s;
  s.kind = ScenarioKind::spread;
  s.n_agents = agents;
  s.n_landmarks = landmarks;
  s.episode_length = 25;
  return s;
}

ScenarioSpec ScenarioSpec::adversary(std::size_t good, std::size_t adversaries) {
  ScenarioSpec s;
  s.kind = ScenarioKind::adversary;
  s.n_agents = good;
  s.n_adversaries = adversaries;
  s.n_landmarks = good;
  s.episode_length = 25;
  return s;
}

ScenarioSpec ScenarioSpec::treasure(std::size_t collectors, std::size_t banks) {
  ScenarioSpec s;
  s.kind = ScenarioKind::treasure;
  s.n_agents = 0;
  s.n_landmarks = 0;
  s.n_collectors = collectors;
  s.n_banks = banks;
  s.episode_length = 100;
  return s;
}

void ScenarioSpec::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("scenario: " + msg); };
  if (episode_length == 0) fail("episode_length must be >= 1");
  if (!(world_half_width > 0.0)) fail("world_half_width must be positive");
  switch (kind) {
    case ScenarioKind::spread:
      if (n_agents < 1) fail("spread needs at least one agent");
      if (n_agents != n_landmarks) fail("spread needs agents == landmarks");
      if (n_adversaries != 0 || n_collectors != 0 || n_banks != 0) {
        fail("spread does not use adversaries, collectors or banks");
      }
      break;
    case ScenarioKind::adversary:
      if (n_agents < 1) fail("adversary needs at least one good agent");
      if (n_adversaries < 1) fail("adversary needs at least one adversary");
      if (n_agents != n_landmarks) fail("adversary needs agents == landmarks");
      if (n_collectors != 0 || n_banks != 0) fail("adversary does not use collectors or banks");
      break;
    case ScenarioKind::treasure:
      if (n_banks < 1) fail("treasure needs at least one bank");
      if (n_collectors < n_banks) fail("treasure needs collectors >= banks");
      if (n_agents != 0 || n_adversaries != 0 || n_landmarks != 0) {
        fail("treasure does not use agents, adversaries or landmarks");
      }
      break;
  }
}

std::size_t ScenarioSpec::agent_count() const {
  switch (kind) {
    case ScenarioKind::spread: return n_agents;
    case ScenarioKind::adversary: return n_agents + n_adversaries;
    case ScenarioKind::treasure: return n_collectors + n_banks;
  }
  return 0;
}

std::vector<Role> ScenarioSpec::roles() const {
  std::vector<Role> out;
  switch (kind) {
    case ScenarioKind::spread:
      out.assign(n_agents, Role::agent);
      break;
    case ScenarioKind::adversary:
      out.assign(n_agents, Role::good);
      out.insert(out.end(), n_adversaries, Role::adversary);
      break;
    case ScenarioKind::treasure:
      out.assign(n_collectors, Role::collector);
      out.insert(out.end(), n_banks, Role::bank);
      break;
  }
  return out;
}

std::string ScenarioSpec::describe() const {
  std::ostringstream out;
  out << to_string(kind);
  switch (kind) {
    case ScenarioKind::spread: out << "(" << n_agents << "," << n_landmarks << ")"; break;
    case ScenarioKind::adversary: out << "(" << n_agents << "," << n_adversaries << ")"; break;
    case ScenarioKind::treasure: out << "(" << n_collectors << "," << n_banks << ")"; break;
  }
  return out.str();
}

}  // namespace distil::env
