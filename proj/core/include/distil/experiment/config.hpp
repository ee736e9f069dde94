#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "distil/env/scenario.hpp"
#include "distil/marl/train_config.hpp"
#include "distil/reuse/reuse_loss.hpp"
#include "distil/reuse/schedule.hpp"

namespace distil::experiment {

enum class Condition { scratch, init_from_teacher, knowru };
std::string to_string(Condition c);
Condition condition_from_string(const std::string& name);

struct KnowruConfig {
  reuse::LossKind loss = reuse::LossKind::mse;
  double temperature = 1.0;
  double alpha0 = 0.5;
  std::optional<double> beta;  // default: floor reached at 80% of the episodes
  double floor = 0.02;
  reuse::ScalerMode scaler = reuse::ScalerMode::dynamic;
  double scale_k = 1.0;

  double resolved_beta(std::size_t episodes) const;
  friend bool operator==(const KnowruConfig&, const KnowruConfig&) = default;
};

/// Source task and snapshot files of the teachers used by init_from_teacher
/// and knowru. Each snapshot needs a `.meta` sidecar.
struct TeacherConfig {
  env::ScenarioSpec source;
  std::vector<std::string> snapshots;

  friend bool operator==(const TeacherConfig&, const TeacherConfig&) = default;
};

struct ExperimentConfig {
  env::ScenarioSpec scenario;
  marl::Algorithm algorithm = marl::Algorithm::maddpg;
  Condition condition = Condition::scratch;
  marl::TrainConfig train;
  std::optional<KnowruConfig> knowru;
  std::optional<TeacherConfig> teachers;
  std::vector<std::uint64_t> seeds{0};
  std::string output = "runs/default";

  /// ConfigError naming the offending key.
  void validate() const;
  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Training defaults for a scenario kind: 5000 episodes; spread/adversary use
/// 25-step episodes updated every 4 episodes, treasure 100-step episodes
/// updated 4 times per episode.
marl::TrainConfig default_train_config(env::ScenarioKind kind);

/// IoError when the file is missing, ConfigError for parse and validation
/// failures (messages start with the key path).
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text);
/// Complete JSON with every default written out; parse_config() reads it back
/// to an equal config.
std::string serialize_config(const ExperimentConfig& config);

}  // namespace distil::experiment
