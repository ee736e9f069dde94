#include "distil/experiment/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "distil/errors.hpp"
#include "distil/metrics/curves_io.hpp"
#include "distil/nn/snapshot.hpp"
#include "distil/reuse/schedule.hpp"
#include "distil/reuse/transfer.hpp"

namespace distil::experiment {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

fs::path manifest_path(const ExperimentConfig& config) {
  return fs::path(config.output) / "manifest.json";
}

json read_manifest(const ExperimentConfig& config) {
  std::ifstream in(manifest_path(config));
  if (!in) return json{{"seeds", json::array()}};
  try {
    json j = json::parse(in);
    if (j.contains("seeds") && j["seeds"].is_array()) return j;
  } catch (const json::parse_error&) {
  }
  return json{{"seeds", json::array()}};
}

void record_in_manifest(const ExperimentConfig& config, const RunRecord& r,
                        const std::vector<std::string>& artifacts) {
  json manifest = read_manifest(config);
  json& seeds = manifest["seeds"];
  json entry;
  entry["seed"] = r.seed;
  entry["status"] = r.ok ? "complete" : "failed";
  if (!r.ok) entry["error"] = r.error;
  entry["artifacts"] = artifacts;
  bool replaced = false;
  for (auto& s : seeds) {
    if (s.value("seed", std::uint64_t{0}) == r.seed) {
      s = entry;
      replaced = true;
    }
  }
  if (!replaced) seeds.push_back(entry);
  write_text(manifest_path(config), manifest.dump(2) + "\n");
}

bool completed_in_manifest(const ExperimentConfig& config, std::uint64_t seed) {
  const json manifest = read_manifest(config);
  for (const auto& s : manifest["seeds"]) {
    if (s.value("seed", std::uint64_t{0}) == seed && s.value("status", "") == "complete") {
      return fs::exists(seed_dir(config, seed) / "curve.csv");
    }
  }
  return false;
}

std::string alpha_label(double a) {
  std::ostringstream out;
  out << a;
  return out.str();
}

}  // namespace

fs::path seed_dir(const ExperimentConfig& config, std::uint64_t seed) {
  return fs::path(config.output) / ("seed_" + std::to_string(seed));
}

std::vector<reuse::TeacherSnapshot> load_teachers(const TeacherConfig& teachers) {
  std::vector<reuse::TeacherSnapshot> out;
  for (const auto& path : teachers.snapshots) {
    reuse::TeacherSnapshot t = reuse::TeacherSnapshot::load(path);
    if (!(t.metadata().source == teachers.source)) {
      throw ConfigError("teachers.snapshots: " + path + " was trained on " +
                        t.metadata().source.describe() + ", not the declared " +
                        teachers.source.describe());
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::size_t init_from_teachers(marl::Trainer& trainer,
                               const std::vector<reuse::TeacherSnapshot>& teachers) {
  std::vector<env::Role> teacher_roles;
  for (const auto& t : teachers) teacher_roles.push_back(t.metadata().role);
  const reuse::PairingPlan plan = reuse::pair_by_role(trainer.spec().roles(), teacher_roles);
  std::size_t copied = 0;
  for (std::size_t i = 0; i < trainer.actors().size(); ++i) {
    const nn::MlpNet& src = teachers[plan.teacher_of[i]].actor();
    marl::ActorNets& dst = trainer.actors()[i];
    const std::size_t layers = std::min(src.num_layers(), dst.actor.num_layers());
    for (std::size_t k = 0; k < layers; ++k) {
      if (src.weights()[k].same_shape(dst.actor.weights()[k])) {
        dst.actor.weights()[k] = src.weights()[k];
        dst.actor.biases()[k] = src.biases()[k];
        ++copied;
      }
    }
    dst.target_actor = dst.actor;
  }
  return copied;
}

marl::Trainer make_trainer(const ExperimentConfig& config, std::uint64_t seed) {
  std::optional<reuse::TransferContext> transfer;
  std::vector<reuse::TeacherSnapshot> teachers;
  if (config.condition != Condition::scratch) teachers = load_teachers(*config.teachers);
  if (config.condition == Condition::knowru) {
    const KnowruConfig& k = *config.knowru;
    reuse::AlphaSchedule schedule(k.alpha0, k.resolved_beta(config.train.episodes), k.floor);
    transfer = reuse::make_transfer_context(teachers, config.scenario, k.loss, k.temperature,
                                            schedule, k.scaler, k.scale_k);
  }
  marl::Trainer trainer(config.scenario, config.algorithm, config.train, seed,
                        std::move(transfer));
  if (config.condition == Condition::init_from_teacher) init_from_teachers(trainer, teachers);
  return trainer;
}

std::string curve_csv(const std::vector<marl::EpisodeStats>& episodes, std::size_t agents) {
  std::ostringstream out;
  out << "episode,mean_reward";
  for (std::size_t i = 0; i < agents; ++i) out << ",reward_" << i;
  out << ',' << kCurveColumnsTail << '\n';
  for (const auto& e : episodes) {
    out << e.episode << ',' << nn::format_real(e.team_reward());
    for (double r : e.mean_reward) out << ',' << nn::format_real(r);
    out << ',' << nn::format_real(e.q_loss) << ',' << nn::format_real(e.critic_loss) << ','
        << nn::format_real(e.reuse_loss) << ',' << nn::format_real(e.scaled_reuse_loss) << ','
        << nn::format_real(e.alpha) << ',' << nn::format_real(e.noise) << '\n';
  }
  return out.str();
}

RunRecord run_seed(const ExperimentConfig& config, std::uint64_t seed, const RunOptions& options) {
  RunRecord r;
  r.seed = seed;
  r.dir = seed_dir(config, seed);
  try {
    marl::Trainer trainer = make_trainer(config, seed);
    for (std::size_t e = 0; e < config.train.episodes; ++e) {
      r.episodes.push_back(trainer.train_episode());
      if (options.progress) options.progress(seed, r.episodes.back());
    }
    for (const auto& e : r.episodes) r.curve.rewards.push_back(e.team_reward());
    r.curve.seed = seed;
    r.curve.label = to_string(config.condition);

    ExperimentConfig echo = config;
    echo.seeds = {seed};
    write_text(r.dir / "config.json", serialize_config(echo));
    write_text(r.dir / "curve.csv", curve_csv(r.episodes, trainer.actors().size()));
    trainer.save(r.dir);
    const auto roles = config.scenario.roles();
    for (std::size_t i = 0; i < trainer.actors().size(); ++i) {
      reuse::TeacherMetadata meta{config.scenario, roles[i], i, seed, config.train.episodes};
      reuse::save_teacher(trainer.actors()[i].actor, meta,
                          r.dir / ("agent_" + std::to_string(i)) / "actor.snap");
    }
    r.ok = true;
  } catch (const std::exception& e) {
    r.ok = false;
    r.error = e.what();
  }
  return r;
}

std::vector<RunRecord> run(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  fs::create_directories(config.output);
  std::vector<RunRecord> out;
  for (std::uint64_t seed : config.seeds) {
    if (options.resume && completed_in_manifest(config, seed)) {
      RunRecord r;
      r.seed = seed;
      r.dir = seed_dir(config, seed);
      r.curve = metrics::read_curve_csv(r.dir / "curve.csv");
      r.curve.seed = seed;
      r.curve.label = to_string(config.condition);
      r.ok = true;
      r.resumed = true;
      out.push_back(std::move(r));
      continue;
    }
    RunRecord r = run_seed(config, seed, options);
    std::vector<std::string> artifacts;
    if (r.ok) {
      for (const auto& entry : fs::recursive_directory_iterator(r.dir)) {
        if (entry.is_regular_file()) {
          artifacts.push_back(fs::relative(entry.path(), config.output).generic_string());
        }
      }
      std::sort(artifacts.begin(), artifacts.end());
    }
    record_in_manifest(config, r, artifacts);
    out.push_back(std::move(r));
  }
  return out;
}

double evaluate_snapshots(const fs::path& run_dir, const ExperimentConfig& config,
                          std::size_t episodes, std::uint64_t seed) {
  ExperimentConfig plain = config;
  plain.condition = Condition::scratch;
  plain.knowru.reset();
  plain.teachers.reset();
  marl::Trainer trainer(plain.scenario, plain.algorithm, plain.train, seed);
  for (std::size_t i = 0; i < trainer.actors().size(); ++i) {
    nn::MlpNet actor =
        nn::load_snapshot(run_dir / ("agent_" + std::to_string(i)) / "actor.snap");
    if (actor.input_size() != trainer.observation_sizes()[i] ||
        actor.output_size() != env::kActionSize) {
      throw ConfigError("snapshot of agent " + std::to_string(i) +
                        " does not fit scenario " + config.scenario.describe());
    }
    trainer.actors()[i].actor = std::move(actor);
  }
  return trainer.evaluate(episodes, seed);
}

AlphaSweepResult alpha_sweep_table(const std::map<double, std::vector<metrics::RewardCurve>>& runs,
                                   const AlphaSweepOptions& options) {
  if (runs.empty()) throw ArgumentError("alpha sweep: no runs");
  AlphaSweepResult result;
  const std::size_t n = runs.begin()->second.front().rewards.size();
  if (options.threshold) {
    result.threshold = *options.threshold;
  } else {
    // The lowest seed-mean final level, a level every alpha eventually holds.
    result.threshold = std::numeric_limits<double>::infinity();
    for (const auto& [alpha, curves] : runs) {
      double acc = 0.0;
      for (const auto& c : curves) acc += metrics::tail_mean(c.rewards, metrics::kDefaultTailFraction);
      result.threshold = std::min(result.threshold, acc / static_cast<double>(curves.size()));
    }
  }
  const std::size_t window = options.stability_window
                                 ? options.stability_window
                                 : std::max<std::size_t>(1, static_cast<std::size_t>(std::round(0.05 * static_cast<double>(n))));
  std::map<double, double> times;
  for (const auto& [alpha, curves] : runs) {
    AlphaSweepRow row;
    row.alpha0 = alpha;
    for (const auto& c : curves) {
      row.per_seed.push_back(
          metrics::censored_time(c.rewards, result.threshold, window, options.half_window));
    }
    double acc = 0.0;
    for (double t : row.per_seed) acc += t;
    // Reaching the level at episode 0 would make ln(Tmax / T) infinite.
    row.time = std::max(1.0, acc / static_cast<double>(row.per_seed.size()));
    times[alpha] = row.time;
    result.rows.push_back(std::move(row));
  }
  const auto perf = reuse::alpha_performance(times);
  for (auto& row : result.rows) row.performance = perf.at(row.alpha0);
  return result;
}

AlphaSweepResult alpha_sweep(const ExperimentConfig& config, const std::vector<double>& alphas,
                             const AlphaSweepOptions& sweep, const RunOptions& options) {
  if (config.condition != Condition::knowru) {
    throw ConfigError("condition: alpha-sweep needs condition knowru");
  }
  if (alphas.empty()) throw ArgumentError("alpha sweep: no alpha values");
  std::map<double, std::vector<metrics::RewardCurve>> runs;
  for (double a : alphas) {
    ExperimentConfig c = config;
    c.knowru->alpha0 = a;
    c.output = (fs::path(config.output) / ("alpha_" + alpha_label(a))).string();
    c.validate();
    for (const auto& r : run(c, options)) {
      if (!r.ok) throw IoError("alpha " + alpha_label(a) + " seed " + std::to_string(r.seed) +
                               " failed: " + r.error);
      runs[a].push_back(r.curve);
    }
  }
  AlphaSweepResult result = alpha_sweep_table(runs, sweep);
  write_text(fs::path(config.output) / "alpha_sweep.csv", alpha_sweep_csv(result));
  return result;
}

std::string alpha_sweep_csv(const AlphaSweepResult& result) {
  std::ostringstream out;
  out << "alpha0,time_to_threshold,performance,threshold,per_seed\n";
  for (const auto& row : result.rows) {
    out << nn::format_real(row.alpha0) << ',' << nn::format_real(row.time) << ','
        << nn::format_real(row.performance) << ',' << nn::format_real(result.threshold) << ',';
    for (std::size_t k = 0; k < row.per_seed.size(); ++k) {
      if (k) out << ';';
      out << nn::format_real(row.per_seed[k]);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace distil::experiment
