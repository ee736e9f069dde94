// distil command-line tool: training runs, evaluation, transfer metrics,
// gradient checks and alpha sweeps.

#include <cstdlib>
#include <iomanip>
#include <iostream>

#include "CLI11.hpp"

#include "distil/errors.hpp"
#include "distil/experiment/config.hpp"
#include "distil/experiment/gradient_suite.hpp"
#include "distil/experiment/runner.hpp"
#include "distil/metrics/curves_io.hpp"

namespace ex = distil::experiment;

namespace {

constexpr int kUsageError = 2;
constexpr int kRuntimeError = 1;

ex::RunOptions progress_options(bool quiet, bool resume, std::size_t every) {
  ex::RunOptions options;
  options.resume = resume;
  if (!quiet) {
    options.progress = [every](std::uint64_t seed, const distil::marl::EpisodeStats& s) {
      if ((s.episode + 1) % every == 0) {
        std::cerr << "seed " << seed << " episode " << s.episode + 1 << " reward "
                  << s.team_reward() << " alpha " << s.alpha << "\n";
      }
    };
  }
  return options;
}

int cmd_train(const std::string& config_path, bool resume, bool quiet) {
  const ex::ExperimentConfig config = ex::load_config(config_path);
  const auto records =
      ex::run(config, progress_options(quiet, resume, std::max<std::size_t>(1, config.train.episodes / 10)));
  int status = 0;
  for (const auto& r : records) {
    if (r.ok) {
      double tail = distil::metrics::tail_mean(r.curve.rewards, 0.1);
      std::cout << "seed " << r.seed << (r.resumed ? " skipped (complete)" : " done")
                << " final-10% mean reward " << tail << " -> " << r.dir.string() << "\n";
    } else {
      std::cout << "seed " << r.seed << " FAILED: " << r.error << "\n";
      status = kRuntimeError;
    }
  }
  return status;
}

int cmd_evaluate(const std::string& dir, const std::string& config_path, std::size_t episodes,
                 std::uint64_t seed) {
  const ex::ExperimentConfig config = ex::load_config(config_path);
  const double mean = ex::evaluate_snapshots(dir, config, episodes, seed);
  std::cout << std::setprecision(17) << "mean reward " << mean << "\n";
  return 0;
}

int cmd_metrics(const std::string& baseline_dir, const std::string& treated_dir,
                const std::string& out, const distil::metrics::ReportOptions& options) {
  const auto baseline = distil::metrics::read_run_set(baseline_dir);
  const auto treated = distil::metrics::read_run_set(treated_dir);
  const auto report = distil::metrics::transfer_report(baseline, treated, options);
  const std::string csv = distil::metrics::report_to_csv(report, baseline_dir, treated_dir);
  distil::metrics::write_report_csv(out, report, baseline_dir, treated_dir);
  std::cout << csv;
  return 0;
}

int cmd_grad_check() {
  double worst = 0.0;
  bool ok = true;
  for (const auto& r : ex::run_gradient_suite()) {
    std::cout << std::left << std::setw(36) << r.name << " max relative error "
              << std::scientific << std::setprecision(3) << r.max_error
              << (r.passed ? "  ok" : "  FAIL") << "\n";
    worst = std::max(worst, r.max_error);
    ok = ok && r.passed;
  }
  std::cout << "max error " << std::scientific << worst << " (tolerance " << ex::kGradientTolerance
            << ")\n";
  return ok ? 0 : kRuntimeError;
}

int cmd_alpha_sweep(const std::string& config_path, const std::vector<double>& alphas,
                    const ex::AlphaSweepOptions& sweep, bool resume, bool quiet) {
  const ex::ExperimentConfig config = ex::load_config(config_path);
  const auto result = ex::alpha_sweep(
      config, alphas, sweep,
      progress_options(quiet, resume, std::max<std::size_t>(1, config.train.episodes / 10)));
  std::cout << ex::alpha_sweep_csv(result);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent actor-critic training with policy reuse"};
  app.require_subcommand(1);

  std::string config_path, dir, baseline_dir, treated_dir, out = "report.csv";
  bool resume = false, quiet = false;
  std::size_t episodes = 100;
  std::uint64_t seed = 0;
  std::vector<double> alphas;
  distil::metrics::ReportOptions report;
  ex::AlphaSweepOptions sweep;
  double threshold = 0.0;

  auto* train = app.add_subcommand("train", "train every seed of a config");
  train->add_option("config", config_path, "experiment config (JSON)")->required();
  train->add_flag("--resume", resume, "skip seeds the manifest lists as complete");
  train->add_flag("--quiet", quiet, "no progress output");

  auto* evaluate = app.add_subcommand("evaluate", "noise-free rollouts of saved actors");
  evaluate->add_option("snapshot-dir", dir, "run directory holding agent_<i>/actor.snap")
      ->required();
  evaluate->add_option("config", config_path, "experiment config (JSON)")->required();
  evaluate->add_option("--episodes", episodes, "evaluation episodes")->check(CLI::PositiveNumber);
  evaluate->add_option("--seed", seed, "evaluation seed");

  auto* metrics = app.add_subcommand("metrics", "transfer metrics of two run sets");
  metrics->add_option("baseline-dir", baseline_dir, "baseline output directory")->required();
  metrics->add_option("treated-dir", treated_dir, "treated output directory")->required();
  metrics->add_option("--out", out, "report CSV path");
  metrics->add_option("--jump-window", report.jump_window, "episodes (default 10%)");
  metrics->add_option("--stability-window", report.stability_window, "episodes (default 5%)");
  metrics->add_option("--smoothing", report.half_window, "smoothing half-window");
  metrics->add_option("--tail-fraction", report.tail_fraction, "asymptotic tail fraction");
  auto* metrics_threshold =
      metrics->add_option("--threshold", threshold, "reward level (default baseline tail mean)");

  app.add_subcommand("grad-check", "finite-difference gradient suite");

  auto* alpha_sweep = app.add_subcommand("alpha-sweep", "time to threshold per initial alpha");
  alpha_sweep->add_option("config", config_path, "knowru experiment config (JSON)")->required();
  alpha_sweep->add_option("--alphas", alphas, "initial alpha values")->required()->expected(1, -1);
  auto* sweep_threshold = alpha_sweep->add_option("--threshold", threshold, "reward level");
  alpha_sweep->add_option("--stability-window", sweep.stability_window, "episodes (default 5%)");
  alpha_sweep->add_option("--smoothing", sweep.half_window, "smoothing half-window");
  alpha_sweep->add_flag("--resume", resume, "skip completed seeds");
  alpha_sweep->add_flag("--quiet", quiet, "no progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (*train) return cmd_train(config_path, resume, quiet);
    if (*evaluate) return cmd_evaluate(dir, config_path, episodes, seed);
    if (*metrics) {
      if (*metrics_threshold) report.threshold = threshold;
      return cmd_metrics(baseline_dir, treated_dir, out, report);
    }
    if (app.got_subcommand("grad-check")) return cmd_grad_check();
    if (*alpha_sweep) {
      if (*sweep_threshold) sweep.threshold = threshold;
      return cmd_alpha_sweep(config_path, alphas, sweep, resume, quiet);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kUsageError;
}
