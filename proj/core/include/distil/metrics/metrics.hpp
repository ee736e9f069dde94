#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace distil::metrics {

/// Per-episode mean reward of one seeded run.
struct RewardCurve {
  std::vector<double> rewards;
  std::uint64_t seed = 0;
  std::string label;
};

inline constexpr std::size_t kDefaultSmoothing = 10;
inline constexpr double kDefaultTailFraction = 0.1;

/// Centered triangular moving average. Indices past either end reflect back
/// into the curve (sample order ..., 1, 0 | 0, 1, ...), which keeps every
/// sample's total weight equal to one, so constants and the curve mean are
/// preserved. half_window 0 is the identity.
std::vector<double> smooth(std::span<const double> curve, std::size_t half_window);

/// Treated minus baseline mean over the first `window` episodes, averaged
/// across seeds. ArgumentError on empty sets or a window longer than a curve.
double jump_start(const std::vector<RewardCurve>& baseline, const std::vector<RewardCurve>& treated,
                  std::size_t window);

/// First episode e with curve[e .. e + stability_window) all >= threshold,
/// after smoothing with `half_window`; nullopt when never reached.
std::optional<std::size_t> time_to_threshold(std::span<const double> curve, double threshold,
                                             std::size_t stability_window,
                                             std::size_t half_window = 0);

/// Treated minus baseline mean over the last `tail_fraction` of each curve,
/// averaged across seeds.
double asymptotic_performance(const std::vector<RewardCurve>& baseline,
                              const std::vector<RewardCurve>& treated,
                              double tail_fraction = kDefaultTailFraction);

double head_mean(std::span<const double> curve, std::size_t window);
double tail_mean(std::span<const double> curve, double tail_fraction);

/// Cross-seed summary: sample standard deviation, CI half-width 1.96 sd / sqrt(n).
struct Summary {
  std::vector<double> values;
  double mean = 0.0;
  double stddev = 0.0;
  double ci_half_width = 0.0;
};
Summary summarize(std::vector<double> values);

struct ReportOptions {
  std::size_t jump_window = 0;         // 0: 10% of the curve length
  std::size_t stability_window = 0;    // 0: 5% of the curve length
  std::size_t half_window = kDefaultSmoothing;
  double tail_fraction = kDefaultTailFraction;
  std::optional<double> threshold;     // default: baseline tail mean across seeds
};

/// Transfer metrics of a treated run set against a baseline. Curves pair up
/// by position (shared seeds). A run that never reaches the threshold counts
/// as reaching it at its curve length.
struct TransferReport {
  Summary jump_start;            // per-seed treated - baseline
  Summary asymptotic_gain;       // per-seed treated - baseline
  Summary baseline_time;         // per-seed time to threshold
  Summary treated_time;
  double threshold = 0.0;
  double time_reduction = 0.0;   // 1 - mean treated time / mean baseline time
  std::size_t jump_window = 0;
  std::size_t stability_window = 0;
};

TransferReport transfer_report(const std::vector<RewardCurve>& baseline,
                               const std::vector<RewardCurve>& treated,
                               const ReportOptions& options = {});

/// Time to threshold with never-reached runs censored at the curve length.
double censored_time(std::span<const double> curve, double threshold,
                     std::size_t stability_window, std::size_t half_window);

}  // namespace distil::metrics
