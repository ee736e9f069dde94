#include "distil/experiment/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "distil/errors.hpp"

namespace distil::experiment {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string to_string(Condition c) {
  switch (c) {
    case Condition::scratch: return "scratch";
    case Condition::init_from_teacher: return "init_from_teacher";
    case Condition::knowru: return "knowru";
  }
  return "?";
}

Condition condition_from_string(const std::string& name) {
  if (name == "scratch") return Condition::scratch;
  if (name == "init_from_teacher") return Condition::init_from_teacher;
  if (name == "knowru") return Condition::knowru;
  throw ConfigError("condition: unknown value '" + name +
                    "' (expected scratch, init_from_teacher or knowru)");
}

double KnowruConfig::resolved_beta(std::size_t episodes) const {
  return beta ? *beta : reuse::AlphaSchedule::default_beta(alpha0, floor, episodes);
}

marl::TrainConfig default_train_config(env::ScenarioKind kind) {
  marl::TrainConfig c;
  c.episodes = 5000;
  if (kind == env::ScenarioKind::treasure) {
    c.update_every = 1;
    c.updates_per_round = 4;
  } else {
    c.update_every = 4;
    c.updates_per_round = 1;
  }
  return c;
}

namespace {

// A JSON object being read under a key path. Every key must be consumed
// before finish(), so typos surface as errors instead of silent defaults.
class Block {
 public:
  Block(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(label() + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  const std::string& path() const { return path_; }

  std::string key_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  Block block(const std::string& key) { return Block(raw(key), key_path(key)); }

  void size(const std::string& key, std::size_t& out) {
    if (!has(key)) return;
    const json& v = raw(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw ConfigError(key_path(key) + ": expected a non-negative integer");
    }
    out = v.get<std::size_t>();
  }

  void u64(const std::string& key, std::uint64_t& out) {
    if (!has(key)) return;
    const json& v = raw(key);
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<long long>() < 0)) {
      throw ConfigError(key_path(key) + ": expected a non-negative integer");
    }
    out = v.get<std::uint64_t>();
  }

  void real(const std::string& key, double& out) {
    if (!has(key)) return;
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError(key_path(key) + ": expected a number");
    out = v.get<double>();
  }

  void text(const std::string& key, std::string& out) {
    if (!has(key)) return;
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError(key_path(key) + ": expected a string");
    out = v.get<std::string>();
  }

  template <class T, class F>
  void choice(const std::string& key, T& out, F from_string) {
    std::string name;
    text(key, name);
    if (!has(key)) return;
    try {
      out = from_string(name);
    } catch (const ConfigError& e) {
      throw ConfigError(key_path(key) + ": " + e.what());
    }
  }

  void require(const std::string& key) const {
    if (!has(key)) throw ConfigError(key_path(key) + ": required key is missing");
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) throw ConfigError(key_path(item.key()) + ": unknown key");
    }
  }

 private:
  std::string label() const { return path_.empty() ? "config" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

env::ScenarioSpec read_scenario(Block b) {
  b.require("kind");
  env::ScenarioKind kind = env::ScenarioKind::spread;
  b.choice("kind", kind, env::scenario_kind_from_string);
  env::ScenarioSpec s;
  switch (kind) {
    case env::ScenarioKind::spread: s = env::ScenarioSpec::spread(3, 3); break;
    case env::ScenarioKind::adversary: s = env::ScenarioSpec::adversary(2, 1); break;
    case env::ScenarioKind::treasure: s = env::ScenarioSpec::treasure(4, 2); break;
  }
  b.size("agents", s.n_agents);
  b.size("adversaries", s.n_adversaries);
  // Spread and adversary pair one landmark with every (good) agent.
  if (kind != env::ScenarioKind::treasure) s.n_landmarks = s.n_agents;
  b.size("landmarks", s.n_landmarks);
  b.size("collectors", s.n_collectors);
  b.size("banks", s.n_banks);
  b.size("episode_length", s.episode_length);
  b.real("world_half_width", s.world_half_width);
  b.u64("seed", s.seed);
  b.finish();
  try {
    s.validate();
  } catch (const ConfigError& e) {
    std::string msg = e.what();
    if (msg.rfind("scenario: ", 0) == 0) msg = msg.substr(10);
    throw ConfigError(b.path() + ": " + msg);
  }
  return s;
}

marl::TrainConfig read_train(Block b, env::ScenarioKind kind) {
  marl::TrainConfig c = default_train_config(kind);
  b.size("episodes", c.episodes);
  b.real("gamma", c.gamma);
  b.real("tau", c.tau);
  b.size("update_every", c.update_every);
  b.size("updates_per_round", c.updates_per_round);
  b.size("sample_size", c.sample_size);
  b.size("minibatch_size", c.minibatch_size);
  b.real("lr_actor", c.lr_actor);
  b.real("lr_critic", c.lr_critic);
  b.real("grad_clip", c.grad_clip);
  b.real("logit_l2", c.logit_l2);
  b.real("noise_scale", c.noise_scale);
  b.real("noise_decay", c.noise_decay);
  b.real("noise_floor", c.noise_floor);
  b.size("hidden_units", c.hidden_units);
  b.size("hidden_layers", c.hidden_layers);
  b.size("attention_dim", c.attention_dim);
  b.choice("critic_loss", c.critic_loss, marl::critic_loss_from_string);
  b.size("buffer_capacity", c.buffer_capacity);
  b.finish();
  return c;
}

KnowruConfig read_knowru(Block b) {
  KnowruConfig k;
  b.choice("loss", k.loss, reuse::loss_kind_from_string);
  b.real("temperature", k.temperature);
  b.real("alpha0", k.alpha0);
  if (b.has("beta")) {
    double beta = 0.0;
    b.real("beta", beta);
    k.beta = beta;
  }
  b.real("floor", k.floor);
  b.choice("scaler", k.scaler, reuse::scaler_mode_from_string);
  b.real("scale_k", k.scale_k);
  b.finish();
  return k;
}

TeacherConfig read_teachers(Block b) {
  TeacherConfig t;
  b.require("source");
  t.source = read_scenario(b.block("source"));
  b.require("snapshots");
  const json& list = b.raw("snapshots");
  if (!list.is_array() || list.empty()) {
    throw ConfigError(b.key_path("snapshots") + ": expected a nonempty list of paths");
  }
  for (const auto& p : list) {
    if (!p.is_string()) throw ConfigError(b.key_path("snapshots") + ": paths must be strings");
    t.snapshots.push_back(p.get<std::string>());
  }
  b.finish();
  return t;
}

ordered_json scenario_json(const env::ScenarioSpec& s) {
  ordered_json j;
  j["kind"] = env::to_string(s.kind);
  j["agents"] = s.n_agents;
  j["adversaries"] = s.n_adversaries;
  j["landmarks"] = s.n_landmarks;
  j["collectors"] = s.n_collectors;
  j["banks"] = s.n_banks;
  j["episode_length"] = s.episode_length;
  j["world_half_width"] = s.world_half_width;
  j["seed"] = s.seed;
  return j;
}

}  // namespace

void ExperimentConfig::validate() const {
  try {
    scenario.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  train.validate();
  if (seeds.empty()) throw ConfigError("seeds: at least one seed is required");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw ConfigError("seeds: duplicate seed");
  }
  if (output.empty()) throw ConfigError("output: must not be empty");
  if (algorithm == marl::Algorithm::maac_lite && scenario.agent_count() < 2) {
    throw ConfigError("algorithm: maac_lite needs at least two agents");
  }
  if (condition == Condition::knowru && !knowru) {
    throw ConfigError("knowru: required when condition is knowru");
  }
  if (condition != Condition::knowru && knowru) {
    throw ConfigError("knowru: only allowed when condition is knowru");
  }
  if (condition != Condition::scratch && !teachers) {
    throw ConfigError("teachers: required when condition is " + to_string(condition));
  }
  if (teachers) {
    if (teachers->snapshots.empty()) throw ConfigError("teachers.snapshots: required key is missing");
    if (teachers->source.kind != scenario.kind) {
      throw ConfigError("teachers.source.kind: must match scenario.kind");
    }
  }
  if (knowru) {
    const KnowruConfig& k = *knowru;
    if (!(k.alpha0 >= 0.0 && k.alpha0 <= 1.0)) throw ConfigError("knowru.alpha0: must lie in [0, 1]");
    if (!(k.floor >= 0.0 && k.floor <= 1.0)) throw ConfigError("knowru.floor: must lie in [0, 1]");
    if (k.beta && !(*k.beta >= 0.0)) throw ConfigError("knowru.beta: must be >= 0");
    if (!(k.temperature > 0.0)) throw ConfigError("knowru.temperature: must be positive");
    if (!(k.scale_k > 0.0)) throw ConfigError("knowru.scale_k: must be positive");
  }
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("parse error: ") + e.what());
  }
  Block root(j, "");
  ExperimentConfig c;
  root.require("scenario");
  c.scenario = read_scenario(root.block("scenario"));
  root.choice("algorithm", c.algorithm, marl::algorithm_from_string);
  root.choice("condition", c.condition, condition_from_string);
  c.train = root.has("train") ? read_train(root.block("train"), c.scenario.kind)
                              : default_train_config(c.scenario.kind);
  if (root.has("knowru")) c.knowru = read_knowru(root.block("knowru"));
  if (root.has("teachers")) c.teachers = read_teachers(root.block("teachers"));
  if (root.has("seeds")) {
    const json& list = root.raw("seeds");
    if (!list.is_array()) throw ConfigError("seeds: expected a list of integers");
    c.seeds.clear();
    for (const auto& s : list) {
      if (!s.is_number_unsigned()) throw ConfigError("seeds: expected non-negative integers");
      c.seeds.push_back(s.get<std::uint64_t>());
    }
  }
  root.text("output", c.output);
  root.finish();
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config(text.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string serialize_config(const ExperimentConfig& c) {
  ordered_json j;
  j["scenario"] = scenario_json(c.scenario);
  j["algorithm"] = marl::to_string(c.algorithm);
  j["condition"] = to_string(c.condition);
  const marl::TrainConfig& t = c.train;
  ordered_json tj;
  tj["episodes"] = t.episodes;
  tj["gamma"] = t.gamma;
  tj["tau"] = t.tau;
  tj["update_every"] = t.update_every;
  tj["updates_per_round"] = t.updates_per_round;
  tj["sample_size"] = t.sample_size;
  tj["minibatch_size"] = t.minibatch_size;
  tj["lr_actor"] = t.lr_actor;
  tj["lr_critic"] = t.lr_critic;
  tj["grad_clip"] = t.grad_clip;
  tj["logit_l2"] = t.logit_l2;
  tj["noise_scale"] = t.noise_scale;
  tj["noise_decay"] = t.noise_decay;
  tj["noise_floor"] = t.noise_floor;
  tj["hidden_units"] = t.hidden_units;
  tj["hidden_layers"] = t.hidden_layers;
  tj["attention_dim"] = t.attention_dim;
  tj["critic_loss"] = marl::to_string(t.critic_loss);
  tj["buffer_capacity"] = t.buffer_capacity;
  j["train"] = tj;
  if (c.knowru) {
    const KnowruConfig& k = *c.knowru;
    ordered_json kj;
    kj["loss"] = reuse::to_string(k.loss);
    kj["temperature"] = k.temperature;
    kj["alpha0"] = k.alpha0;
    if (k.beta) kj["beta"] = *k.beta;
    kj["floor"] = k.floor;
    kj["scaler"] = reuse::to_string(k.scaler);
    kj["scale_k"] = k.scale_k;
    j["knowru"] = kj;
  }
  if (c.teachers) {
    ordered_json tt;
    tt["source"] = scenario_json(c.teachers->source);
    tt["snapshots"] = c.teachers->snapshots;
    j["teachers"] = tt;
  }
  j["seeds"] = c.seeds;
  j["output"] = c.output;
  return j.dump(2) + "\n";
}

}  // namespace distil::experiment
