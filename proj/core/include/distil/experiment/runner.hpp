#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "distil/experiment/config.hpp"
#include "distil/marl/trainer.hpp"
#include "distil/metrics/metrics.hpp"
#include "distil/reuse/teacher.hpp"

namespace distil::experiment {

/// Outcome of one seed. `curve` holds the per-episode team reward; `episodes`
/// is empty when the seed was skipped by --resume.
struct RunRecord {
  std::uint64_t seed = 0;
  std::filesystem::path dir;
  std::vector<marl::EpisodeStats> episodes;
  metrics::RewardCurve curve;
  bool ok = false;
  bool resumed = false;
  std::string error;
};

struct RunOptions {
  bool resume = false;
  /// Called after every episode; may be empty.
  std::function<void(std::uint64_t seed, const marl::EpisodeStats&)> progress;
};

/// Per-seed run directory: `<output>/seed_<s>`.
std::filesystem::path seed_dir(const ExperimentConfig& config, std::uint64_t seed);

/// Trains every seed. Run layout:
///
///   <output>/manifest.json
///   <output>/seed_<s>/config.json            resolved config, seeds = [s]
///   <output>/seed_<s>/curve.csv
///   <output>/seed_<s>/agent_<i>/actor.snap (+ .meta), actor_target.snap, critic*.snap
///
/// A failing seed is recorded in the manifest and does not stop the others.
std::vector<RunRecord> run(const ExperimentConfig& config, const RunOptions& options = {});

/// Trains one seed in memory and writes its directory.
RunRecord run_seed(const ExperimentConfig& config, std::uint64_t seed,
                   const RunOptions& options = {});

/// Builds the trainer for `seed` with the condition wired in (teachers loaded,
/// init weights copied, transfer context attached).
marl::Trainer make_trainer(const ExperimentConfig& config, std::uint64_t seed);

/// Loads the configured teachers; ConfigError when one does not come from the
/// declared source task.
std::vector<reuse::TeacherSnapshot> load_teachers(const TeacherConfig& teachers);

/// Copies every teacher layer whose shape equals the student's; other layers
/// keep their fresh initialization. Target actors are reset to the result.
/// Returns the number of layers copied.
std::size_t init_from_teachers(marl::Trainer& trainer,
                               const std::vector<reuse::TeacherSnapshot>& teachers);

inline constexpr const char* kCurveColumnsTail =
    "q_loss,critic_loss,reuse_loss,scaled_reuse_loss,alpha,noise";
std::string curve_csv(const std::vector<marl::EpisodeStats>& episodes, std::size_t agents);

/// Noise-free rollouts of the actors stored in a run directory (`agent_<i>/actor.snap`).
double evaluate_snapshots(const std::filesystem::path& run_dir, const ExperimentConfig& config,
                          std::size_t episodes, std::uint64_t seed = 0);

struct AlphaSweepRow {
  double alpha0 = 0.0;
  double time = 0.0;  // seed-mean time to threshold (censored at curve length)
  double performance = 0.0;
  std::vector<double> per_seed;
};

struct AlphaSweepResult {
  double threshold = 0.0;
  std::vector<AlphaSweepRow> rows;
};

struct AlphaSweepOptions {
  std::optional<double> threshold;  // default: lowest seed-mean final-10% level over the alphas
  std::size_t stability_window = 0;  // 0: 5% of the episodes
  std::size_t half_window = metrics::kDefaultSmoothing;
};

/// Times to threshold from already trained curves, one curve set per alpha0.
AlphaSweepResult alpha_sweep_table(const std::map<double, std::vector<metrics::RewardCurve>>& runs,
                                   const AlphaSweepOptions& options = {});

/// Runs `config` (condition knowru) once per alpha0 into `<output>/alpha_<a>`
/// and writes `<output>/alpha_sweep.csv`.
AlphaSweepResult alpha_sweep(const ExperimentConfig& config, const std::vector<double>& alphas,
                             const AlphaSweepOptions& sweep = {}, const RunOptions& options = {});

std::string alpha_sweep_csv(const AlphaSweepResult& result);

}  // namespace distil::experiment
