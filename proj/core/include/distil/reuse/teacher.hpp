#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "distil/env/scenario.hpp"
#include "distil/nn/mlp.hpp"

namespace distil::reuse {

/// Where a teacher actor came from. Stored next to the snapshot as
/// `<snapshot>.meta`, one `key: value` per line.
struct TeacherMetadata {
  env::ScenarioSpec source;
  env::Role role = env::Role::agent;
  std::size_t agent_index = 0;
  std::uint64_t seed = 0;
  std::size_t episodes = 0;

  friend bool operator==(const TeacherMetadata&, const TeacherMetadata&) = default;
};

std::string metadata_to_string(const TeacherMetadata& meta);
TeacherMetadata metadata_from_string(const std::string& text);
std::filesystem::path metadata_path(const std::filesystem::path& snapshot);

/// A frozen actor from a source task. Nothing mutates it after construction.
class TeacherSnapshot {
 public:
  TeacherSnapshot(nn::MlpNet actor, TeacherMetadata meta);

  /// Loads `<path>` and its `.meta` sidecar. IoError when either is missing.
  static TeacherSnapshot load(const std::filesystem::path& path);

  const nn::MlpNet& actor() const { return actor_; }
  const TeacherMetadata& metadata() const { return meta_; }
  std::size_t input_size() const { return actor_.input_size(); }

 private:
  nn::MlpNet actor_;
  TeacherMetadata meta_;
};

/// Writes the actor snapshot and its metadata sidecar.
void save_teacher(const nn::MlpNet& actor, const TeacherMetadata& meta,
                  const std::filesystem::path& path);

/// Student index -> teacher index.
struct PairingPlan {
  std::vector<std::size_t> teacher_of;

  friend bool operator==(const PairingPlan&, const PairingPlan&) = default;
};

/// Round robin: student i gets teacher i mod teachers. ConfigError for zero teachers.
PairingPlan pair(std::size_t students, std::size_t teachers);

/// Round robin within each role, so students only mimic teachers that played
/// the same role. ConfigError when a student role has no teacher.
PairingPlan pair_by_role(const std::vector<env::Role>& students,
                         const std::vector<env::Role>& teachers);

}  // namespace distil::reuse
