#include "distil/reuse/teacher.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "distil/errors.hpp"
#include "distil/nn/snapshot.hpp"
#include "distil/reuse/transfer.hpp"

namespace distil::reuse {

std::string metadata_to_string(const TeacherMetadata& meta) {
  const env::ScenarioSpec& s = meta.source;
  std::ostringstream out;
  out << "scenario: " << env::to_string(s.kind) << "\n"
      << "agents: " << s.n_agents << "\n"
      << "adversaries: " << s.n_adversaries << "\n"
      << "landmarks: " << s.n_landmarks << "\n"
      << "collectors: " << s.n_collectors << "\n"
      << "banks: " << s.n_banks << "\n"
      << "episode_length: " << s.episode_length << "\n"
      << "world_half_width: " << nn::format_real(s.world_half_width) << "\n"
      << "scenario_seed: " << s.seed << "\n"
      << "role: " << env::to_string(meta.role) << "\n"
      << "agent_index: " << meta.agent_index << "\n"
      << "seed: " << meta.seed << "\n"
      << "episodes: " << meta.episodes << "\n";
  return out.str();
}

TeacherMetadata metadata_from_string(const std::string& text) {
  std::map<std::string, std::string> fields;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw IoError("teacher metadata: malformed line '" + line + "'");
    std::string value = line.substr(colon + 1);
    value.erase(0, value.find_first_not_of(' '));
    fields[line.substr(0, colon)] = value;
  }
  auto get = [&](const std::string& key) -> const std::string& {
    const auto it = fields.find(key);
    if (it == fields.end()) throw IoError("teacher metadata: missing '" + key + "'");
    return it->second;
  };
  auto count = [&](const std::string& key) {
    try {
      return static_cast<std::size_t>(std::stoull(get(key)));
    } catch (const std::logic_error&) {
      throw IoError("teacher metadata: bad value for '" + key + "'");
    }
  };
  TeacherMetadata meta;
  try {
    meta.source.kind = env::scenario_kind_from_string(get("scenario"));
    meta.role = env::role_from_string(get("role"));
  } catch (const ConfigError& e) {
    throw IoError(std::string("teacher metadata: ") + e.what());
  }
  meta.source.n_agents = count("agents");
  meta.source.n_adversaries = count("adversaries");
  meta.source.n_landmarks = count("landmarks");
  meta.source.n_collectors = count("collectors");
  meta.source.n_banks = count("banks");
  meta.source.episode_length = count("episode_length");
  meta.source.world_half_width = nn::parse_real(get("world_half_width"));
  meta.source.seed = count("scenario_seed");
  meta.agent_index = count("agent_index");
  meta.seed = count("seed");
  meta.episodes = count("episodes");
  return meta;
}

std::filesystem::path metadata_path(const std::filesystem::path& snapshot) {
  std::filesystem::path p = snapshot;
  p += ".meta";
  return p;
}

TeacherSnapshot::TeacherSnapshot(nn::MlpNet actor, TeacherMetadata meta)
    : actor_(std::move(actor)), meta_(std::move(meta)) {
  actor_.clear_cache();
}

TeacherSnapshot TeacherSnapshot::load(const std::filesystem::path& path) {
  nn::MlpNet actor = nn::load_snapshot(path);
  const auto meta_file = metadata_path(path);
  std::ifstream in(meta_file);
  if (!in) throw IoError("cannot open teacher metadata " + meta_file.string());
  std::ostringstream text;
  text << in.rdbuf();
  return TeacherSnapshot(std::move(actor), metadata_from_string(text.str()));
}

void save_teacher(const nn::MlpNet& actor, const TeacherMetadata& meta,
                  const std::filesystem::path& path) {
  nn::save_snapshot(actor, path);
  const auto meta_file = metadata_path(path);
  std::ofstream out(meta_file);
  if (!out) throw IoError("cannot write " + meta_file.string());
  out << metadata_to_string(meta);
  if (!out) throw IoError("write failed for " + meta_file.string());
}

PairingPlan pair(std::size_t students, std::size_t teachers) {
  if (teachers == 0) throw ConfigError("pairing needs at least one teacher");
  PairingPlan plan;
  for (std::size_t i = 0; i < students; ++i) plan.teacher_of.push_back(i % teachers);
  return plan;
}

PairingPlan pair_by_role(const std::vector<env::Role>& students,
                         const std::vector<env::Role>& teachers) {
  PairingPlan plan;
  std::map<env::Role, std::size_t> seen;
  for (env::Role role : students) {
    std::vector<std::size_t> candidates;
    for (std::size_t t = 0; t < teachers.size(); ++t) {
      if (teachers[t] == role) candidates.push_back(t);
    }
    if (candidates.empty()) {
      throw ConfigError("no teacher for student role " + env::to_string(role));
    }
    plan.teacher_of.push_back(candidates[seen[role]++ % candidates.size()]);
  }
  return plan;
}

TransferContext make_transfer_context(std::vector<TeacherSnapshot> teachers,
                                      const env::ScenarioSpec& target, LossKind loss,
                                      double temperature, AlphaSchedule schedule,
                                      ScalerMode scaler_mode, double scale_k) {
  if (teachers.empty()) throw ConfigError("knowru needs at least one teacher");
  std::vector<env::Role> teacher_roles;
  for (const auto& t : teachers) {
    const TeacherMetadata& m = t.metadata();
    const auto layout = env::observation_layout(m.source, m.agent_index);
    if (layout.size() != t.input_size()) {
      throw ConfigError("teacher input size " + std::to_string(t.input_size()) +
                        " does not match its source " + m.source.describe());
    }
    teacher_roles.push_back(m.role);
  }
  TransferContext ctx{.teachers = std::move(teachers),
                      .pairing = pair_by_role(target.roles(), teacher_roles),
                      .adapters = {},
                      .loss = loss,
                      .temperature = temperature,
                      .schedule = schedule,
                      .scalers = {}};
  for (std::size_t i = 0; i < target.agent_count(); ++i) {
    const TeacherMetadata& m = ctx.teacher_of(i).metadata();
    ctx.adapters.push_back(ObservationAdapter::between(m.source, m.agent_index, target, i));
    ctx.scalers.emplace_back(scaler_mode, scale_k);
  }
  return ctx;
}

}  // namespace distil::reuse
