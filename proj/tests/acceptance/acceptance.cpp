// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   distil_acceptance [--work DIR] [--reuse] [--only NAME,...]
//
// The desk-scale experiments train into DIR (default ./acceptance_work).
// --reuse keeps finished seeds from an earlier run instead of retraining.

#include "CLI11.hpp"
#include <boost/math/distributions/chi_squared.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "distil/errors.hpp"
#include "distil/experiment/gradient_suite.hpp"
#include "distil/experiment/runner.hpp"
#include "distil/metrics/metrics.hpp"
#include "distil/nn/losses.hpp"
#include "distil/replay/replay_buffer.hpp"
#include "distil/reuse/schedule.hpp"
#include "env_oracles.hpp"

namespace fs = std::filesystem;
using namespace distil;
using experiment::Condition;
using experiment::ExperimentConfig;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// ---------------------------------------------------------------- gradients

Outcome gradient_suite() {
  const auto start = std::chrono::steady_clock::now();
  const std::string cmd = std::string("\"") + DISTIL_CLI_PATH + "\" grad-check > /dev/null";
  const int status = std::system(cmd.c_str());
  const double secs = seconds_since(start);

  double worst = 0.0;
  std::size_t failed = 0;
  const auto results = experiment::run_gradient_suite();
  for (const auto& r : results) {
    worst = std::max(worst, r.max_error);
    if (!(r.max_error < experiment::kGradientTolerance)) ++failed;
  }
  return {status == 0 && failed == 0 && secs < 60.0,
          fmt("%zu checks, max relative error %.3g (< 1e-4), grad-check exit %d in %.1fs (< 60s)",
              results.size(), worst, status, secs)};
}

// ------------------------------------------------------------------ losses

Outcome closed_form_losses() {
  double worst = 0.0;
  int bad = 0;
  auto check = [&](double got, double want, double t = 1e-9) {
    const double e = std::abs(got - want);
    worst = std::max(worst, e);
    if (!(e <= t)) ++bad;
  };

  {
    const std::vector<double> z{0, 0, 0};
    for (double p : nn::softmax_t(z, 1.0)) check(p, 1.0 / 3.0);
  }
  {
    const std::vector<double> z{std::log(2.0), 0.0};
    const auto p = nn::softmax_t(z, 1.0);
    check(p[0], 2.0 / 3.0);
    check(p[1], 1.0 / 3.0);
  }
  {
    const std::vector<double> z{5.0, -5.0};
    for (double p : nn::softmax_t(z, 1e6)) {
      const double e = std::abs(p - 0.5);
      if (!(e <= 1e-5)) ++bad;
    }
  }
  {
    const auto a = nn::Matrix::column({0.3, -1.2, 4.0});
    const auto r = nn::mse_loss(a, a);
    check(r.value, 0.0);
    for (std::size_t i = 0; i < 3; ++i) check(r.grad(i, 0), 0.0);
    check(nn::mse_loss(nn::Matrix::column({1, 2}), nn::Matrix::column({3, 4})).value, 4.0);
  }
  {
    const std::vector<double> p{0.2, 0.5, 0.3};
    check(nn::kl_divergence(p, p), 0.0);
    const std::vector<double> one{1.0, 0.0}, half{0.5, 0.5};
    check(nn::kl_divergence(one, half), std::numbers::ln2);
  }
  {
    const auto z = nn::Matrix::from_rows({{0.4, -2.0}, {1.5, 0.0}, {-0.7, 3.0}, {0.0, 0.1}, {2.2, -1.0}});
    for (double t : {0.5, 1.0, 4.0}) check(nn::kd_loss(z, z, t).value, 0.0);
  }
  return {bad == 0, fmt("%d mismatches, max abs error %.3g (tolerance 1e-9)", bad, worst)};
}

// ---------------------------------------------------------------- schedule

Outcome schedule_exactness() {
  constexpr double a0 = 0.5, floor = 0.02;
  int mismatches = 0;
  std::size_t clamped_at = 0;
  for (double beta : {reuse::AlphaSchedule::default_beta(a0, floor, 800), 0.01, 0.003}) {
    reuse::AlphaSchedule s(a0, beta, floor);
    if (s.alpha() != a0) ++mismatches;
    bool clamped = false;
    for (std::size_t k = 1; k <= 3000; ++k) {
      const double got = s.step();
      const double linear = a0 - static_cast<double>(k) * beta;
      if (!clamped && linear <= floor) {
        clamped = true;
        if (beta == 0.01) clamped_at = k;
      }
      const double want = clamped ? floor : linear;
      if (got != want) ++mismatches;
    }
  }
  return {mismatches == 0,
          fmt("alpha0=0.5 floor=0.02, 3 betas x 3000 steps, %d inexact values (beta=0.01 clamps at step %zu)",
              mismatches, clamped_at)};
}

// ------------------------------------------------------------- environment

Outcome environment_oracles() {
  using env::ScenarioSpec;
  double reward = 0.0, mirror = 0.0, shift = 0.0;
  const std::vector<ScenarioSpec> specs{ScenarioSpec::spread(3, 3), ScenarioSpec::spread(1, 1),
                                        ScenarioSpec::adversary(2, 2), ScenarioSpec::adversary(3, 1),
                                        ScenarioSpec::treasure(4, 2), ScenarioSpec::treasure(3, 1)};
  for (const auto& spec : specs) reward = std::max(reward, testing::reward_oracle_error(spec, 1000, 2024));
  for (const auto& spec : {ScenarioSpec::spread(3, 3), ScenarioSpec::adversary(2, 2), ScenarioSpec::treasure(3, 2)}) {
    for (std::uint64_t seed : {1u, 2u, 3u}) mirror = std::max(mirror, testing::mirror_error(spec, 40, seed));
    for (std::uint64_t seed : {4u, 5u}) shift = std::max(shift, testing::translation_error(spec, 15, seed));
  }
  return {reward <= 1e-12 && mirror <= 1e-12 && shift <= 1e-12,
          fmt("reward oracle max diff %.3g over 6x1000 states, mirror %.3g, translation %.3g (all <= 1e-12)",
              reward, mirror, shift)};
}

// ------------------------------------------------------------------ replay

replay::Transition tagged(double id) {
  replay::Transition t;
  t.observations.emplace_back(2, id);
  t.next_observations.emplace_back(2, id);
  t.actions.emplace_back(5, id);
  t.rewards.push_back(id);
  return t;
}

Outcome replay_statistics() {
  const replay::TransitionDims dims{{2}, 5};
  constexpr std::size_t items = 100;
  replay::ReplayBuffer b(dims, items, 99);
  for (std::size_t k = 0; k < items; ++k) b.push(tagged(static_cast<double>(k)));
  std::vector<double> counts(items, 0.0);
  for (int round = 0; round < 10000; ++round)
    for (std::size_t i : b.sample_indices(items)) counts[i] += 1.0;
  const double expected = 1e6 / items;
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  const boost::math::chi_squared dist(static_cast<double>(items - 1));
  const double p = boost::math::cdf(boost::math::complement(dist, chi2));

  // Every push sequence of length up to 3 * capacity against a deque model.
  std::size_t violations = 0, states = 0;
  for (std::size_t cap = 1; cap <= 8; ++cap) {
    replay::ReplayBuffer r(dims, cap, 1);
    std::deque<double> model;
    for (std::size_t k = 0; k < 3 * cap + 1; ++k) {
      r.push(tagged(static_cast<double>(k)));
      model.push_back(static_cast<double>(k));
      if (model.size() > cap) model.pop_front();
      ++states;
      if (r.size() != model.size()) ++violations;
      else
        for (std::size_t i = 0; i < model.size(); ++i)
          if (!(r.at(i) == tagged(model[i]))) ++violations;
    }
  }
  return {p > 0.01 && violations == 0,
          fmt("chi-square p=%.3f over 1e6 draws (> 0.01), FIFO %zu violations in %zu states (capacity 1..8)",
              p, violations, states)};
}

// -------------------------------------------------------------- desk scale

marl::TrainConfig desk_train() {
  marl::TrainConfig c;
  c.episodes = 800;
  c.update_every = 1;
  c.lr_actor = 0.01;
  c.lr_critic = 0.01;
  c.sample_size = 1024;
  c.minibatch_size = 256;
  return c;
}

class Desk {
 public:
  Desk(fs::path work, bool reuse) : work_(std::move(work)), reuse_(reuse) {
    if (!reuse_) fs::remove_all(work_);
    fs::create_directories(work_);
  }

  const fs::path& work() const { return work_; }

  // Source-task actors on spread(2,2), trained once.
  experiment::TeacherConfig teachers() {
    if (!teachers_) {
      ExperimentConfig c;
      c.scenario = env::ScenarioSpec::spread(2, 2);
      c.train = desk_train();
      c.seeds = {100};
      c.output = (work_ / "teacher").string();
      require(train(c, "teacher"));
      experiment::TeacherConfig t;
      t.source = c.scenario;
      for (int i = 0; i < 2; ++i)
        t.snapshots.push_back((work_ / "teacher" / "seed_100" / ("agent_" + std::to_string(i)) / "actor.snap").string());
      teachers_ = t;
    }
    return *teachers_;
  }

  ExperimentConfig target(Condition condition, const fs::path& output) {
    ExperimentConfig c;
    c.scenario = env::ScenarioSpec::spread(3, 3);
    c.condition = condition;
    c.train = desk_train();
    c.seeds = {1, 2, 3, 4, 5};
    c.output = output.string();
    if (condition != Condition::scratch) c.teachers = teachers();
    if (condition == Condition::knowru) c.knowru = experiment::KnowruConfig{};
    return c;
  }

  // Cached curve sets, keyed by output directory.
  std::vector<metrics::RewardCurve> curves(Condition condition) {
    return curves_at(target(condition, output_for(condition)));
  }

  std::vector<metrics::RewardCurve> curves_at(const ExperimentConfig& c) {
    auto& slot = cache_[c.output];
    if (slot.empty()) slot = train(c, to_string(c.condition));
    return slot;
  }

  fs::path sweep_dir() const { return work_ / "alpha_sweep"; }

  // The knowru run doubles as the alpha0 = 0.5 point of the sweep.
  fs::path output_for(Condition condition) const {
    if (condition == Condition::knowru) return sweep_dir() / "alpha_0.5";
    return work_ / to_string(condition);
  }

  std::vector<metrics::RewardCurve> train(const ExperimentConfig& c, const std::string& what) {
    const auto start = std::chrono::steady_clock::now();
    experiment::RunOptions options;
    options.resume = reuse_;
    const auto records = experiment::run(c, options);
    std::vector<metrics::RewardCurve> out;
    for (const auto& r : records) {
      if (!r.ok) throw StateError(what + " seed " + std::to_string(r.seed) + " failed: " + r.error);
      out.push_back(r.curve);
    }
    std::printf("# trained %s (%zu seeds) in %.0fs\n", what.c_str(), records.size(), seconds_since(start));
    std::fflush(stdout);
    return out;
  }

 private:
  static void require(const std::vector<metrics::RewardCurve>& curves) {
    if (curves.empty()) throw StateError("no curves");
  }

  fs::path work_;
  bool reuse_;
  std::optional<experiment::TeacherConfig> teachers_;
  std::map<std::string, std::vector<metrics::RewardCurve>> cache_;
};

metrics::ReportOptions desk_report(const std::vector<metrics::RewardCurve>& scratch) {
  metrics::ReportOptions o;
  o.jump_window = 80;
  o.stability_window = 40;
  double tail = 0.0;
  for (const auto& c : scratch) tail += metrics::tail_mean(c.rewards, 0.1);
  o.threshold = tail / static_cast<double>(scratch.size());
  return o;
}

Outcome knowru_off(Desk& desk) {
  ExperimentConfig scratch = desk.target(Condition::scratch, desk.work() / "off_scratch");
  ExperimentConfig knowru = desk.target(Condition::knowru, desk.work() / "off_knowru");
  for (ExperimentConfig* c : {&scratch, &knowru}) {
    c->train.episodes = 60;
    c->seeds = {1, 2};
  }
  knowru.knowru->alpha0 = 0.0;
  desk.train(scratch, "scratch (short)");
  desk.train(knowru, "knowru alpha0=0 (short)");

  std::size_t compared = 0, differing = 0;
  const fs::path a = scratch.output, b = knowru.output;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), a);
    // config.json and the manifest name the condition itself.
    if (rel.filename() == "config.json" || rel.filename() == "manifest.json") continue;
    ++compared;
    if (read_file(entry.path()) != read_file(b / rel)) ++differing;
  }
  return {compared > 0 && differing == 0,
          fmt("spread(3,3) 2 seeds x 60 episodes: %zu of %zu curve/snapshot files differ", differing, compared)};
}

Outcome desk_transfer(Desk& desk) {
  const auto scratch = desk.curves(Condition::scratch);
  const auto knowru = desk.curves(Condition::knowru);
  const auto report = metrics::transfer_report(scratch, knowru, desk_report(scratch));
  int positive = 0;
  for (double j : report.jump_start.values) positive += j > 0.0;
  std::ostringstream per;
  for (double j : report.jump_start.values) per << (per.tellp() ? "," : "") << fmt("%+.3f", j);
  return {positive >= 4 && report.time_reduction >= 0.10,
          fmt("jump_start>0 in %d/5 seeds (need 4) [%s], time to threshold %.1f -> %.1f episodes, "
              "reduction %.1f%% (need 10%%), threshold %.4f",
              positive, per.str().c_str(), report.baseline_time.mean, report.treated_time.mean,
              100.0 * report.time_reduction, report.threshold)};
}

Outcome init_sanity(Desk& desk) {
  const auto scratch = desk.curves(Condition::scratch);
  const double knowru = metrics::jump_start(scratch, desk.curves(Condition::knowru), 80);
  const double init = metrics::jump_start(scratch, desk.curves(Condition::init_from_teacher), 80);
  return {init <= knowru, fmt("seed-mean jump_start init_from_teacher %+.4f <= knowru %+.4f", init, knowru)};
}

Outcome alpha_sweep_shape(Desk& desk) {
  const auto scratch = desk.curves(Condition::scratch);
  desk.curves(Condition::knowru);  // alpha0 = 0.5, reused by the sweep below
  ExperimentConfig c = desk.target(Condition::knowru, desk.sweep_dir());
  experiment::AlphaSweepOptions sweep;
  sweep.threshold = desk_report(scratch).threshold;
  sweep.stability_window = 40;
  experiment::RunOptions options;
  options.resume = true;
  const auto start = std::chrono::steady_clock::now();
  const auto result = experiment::alpha_sweep(c, {0.1, 0.3, 0.5, 0.7, 0.9}, sweep, options);
  std::printf("# alpha sweep in %.0fs\n", seconds_since(start));

  std::map<double, double> perf;
  std::ostringstream table;
  for (const auto& row : result.rows) {
    perf[row.alpha0] = row.performance;
    table << (table.tellp() ? " " : "") << fmt("%.1f:T=%.1f,P=%.3f", row.alpha0, row.time, row.performance);
  }
  const bool ok = perf.size() == 5 && perf.at(0.3) >= perf.at(0.1) && perf.at(0.5) >= perf.at(0.1);
  return {ok, fmt("Performance at 0.3 and 0.5 >= at 0.1 [%s]", table.str().c_str())};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::string work = "acceptance_work";
  bool reuse = false;
  std::vector<std::string> only;
  app.add_option("--work", work, "directory for the desk-scale runs");
  app.add_flag("--reuse", reuse, "keep finished seeds from an earlier run");
  app.add_option("--only", only, "run only these criteria")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  Desk desk(work, reuse);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gradient_suite", gradient_suite},
      {"closed_form_losses", closed_form_losses},
      {"schedule_exactness", schedule_exactness},
      {"environment_oracles", environment_oracles},
      {"replay_statistics", replay_statistics},
      {"knowru_off_equivalence", [&] { return knowru_off(desk); }},
      {"desk_transfer", [&] { return desk_transfer(desk); }},
      {"init_baseline_sanity", [&] { return init_sanity(desk); }},
      {"alpha_sweep_shape", [&] { return alpha_sweep_shape(desk); }},
  };
  const std::set<std::string> selected(only.begin(), only.end());

  int failures = 0;
  for (const auto& [name, check] : criteria) {
    if (!selected.empty() && !selected.contains(name)) continue;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failures += !o.passed;
    std::printf("%s %s: %s\n", o.passed ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
