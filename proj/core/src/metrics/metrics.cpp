#include "distil/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "distil/errors.hpp"

namespace distil::metrics {

namespace {

std::size_t reflect(std::ptrdiff_t m, std::size_t n) {
  const auto period = static_cast<std::ptrdiff_t>(2 * n);
  std::ptrdiff_t r = m % period;
  if (r < 0) r += period;
  return r < static_cast<std::ptrdiff_t>(n) ? static_cast<std::size_t>(r)
                                            : static_cast<std::size_t>(period - 1 - r);
}

void check_sets(const std::vector<RewardCurve>& baseline, const std::vector<RewardCurve>& treated,
                const char* what) {
  if (baseline.empty() || treated.empty()) {
    throw ArgumentError(std::string(what) + ": empty curve set");
  }
  for (const auto* set : {&baseline, &treated}) {
    for (const auto& c : *set) {
      if (c.rewards.empty()) throw ArgumentError(std::string(what) + ": empty curve");
    }
  }
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::size_t tail_length(std::size_t n, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
    throw ArgumentError("tail_fraction must lie in (0, 1]");
  }
  const auto k = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(n) - 1e-9));
  return std::clamp<std::size_t>(k, 1, n);
}

std::size_t percent_of(std::size_t n, double fraction) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::round(fraction * static_cast<double>(n))));
}

}  // namespace

std::vector<double> smooth(std::span<const double> curve, std::size_t half_window) {
  const std::size_t n = curve.size();
  std::vector<double> out(curve.begin(), curve.end());
  if (half_window == 0 || n == 0) return out;
  const auto h = static_cast<std::ptrdiff_t>(half_window);
  const double norm = static_cast<double>((half_window + 1) * (half_window + 1));
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::ptrdiff_t k = -h; k <= h; ++k) {
      const double w = static_cast<double>(h + 1 - std::abs(k));
      acc += w * curve[reflect(static_cast<std::ptrdiff_t>(i) + k, n)];
    }
    out[i] = acc / norm;
  }
  return out;
}

double head_mean(std::span<const double> curve, std::size_t window) {
  if (window == 0 || window > curve.size()) {
    throw ArgumentError("window must lie in [1, curve length]");
  }
  return mean_of(curve.first(window));
}

double tail_mean(std::span<const double> curve, double tail_fraction) {
  if (curve.empty()) throw ArgumentError("tail_mean: empty curve");
  return mean_of(curve.last(tail_length(curve.size(), tail_fraction)));
}

double jump_start(const std::vector<RewardCurve>& baseline, const std::vector<RewardCurve>& treated,
                  std::size_t window) {
  check_sets(baseline, treated, "jump_start");
  double b = 0.0;
  for (const auto& c : baseline) b += head_mean(c.rewards, window);
  double t = 0.0;
  for (const auto& c : treated) t += head_mean(c.rewards, window);
  return t / static_cast<double>(treated.size()) - b / static_cast<double>(baseline.size());
}

std::optional<std::size_t> time_to_threshold(std::span<const double> curve, double threshold,
                                             std::size_t stability_window,
                                             std::size_t half_window) {
  if (stability_window == 0) throw ArgumentError("stability_window must be >= 1");
  const std::vector<double> s = smooth(curve, half_window);
  std::size_t run = 0;
  for (std::size_t e = 0; e < s.size(); ++e) {
    run = s[e] >= threshold ? run + 1 : 0;
    if (run == stability_window) return e + 1 - stability_window;
  }
  return std::nullopt;
}

double asymptotic_performance(const std::vector<RewardCurve>& baseline,
                              const std::vector<RewardCurve>& treated, double tail_fraction) {
  check_sets(baseline, treated, "asymptotic_performance");
  double b = 0.0;
  for (const auto& c : baseline) b += tail_mean(c.rewards, tail_fraction);
  double t = 0.0;
  for (const auto& c : treated) t += tail_mean(c.rewards, tail_fraction);
  return t / static_cast<double>(treated.size()) - b / static_cast<double>(baseline.size());
}

Summary summarize(std::vector<double> values) {
  Summary s;
  s.values = std::move(values);
  if (s.values.empty()) return s;
  const double n = static_cast<double>(s.values.size());
  s.mean = mean_of(s.values);
  if (s.values.size() > 1) {
    double ss = 0.0;
    for (double v : s.values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / (n - 1.0));
  }
  s.ci_half_width = 1.96 * s.stddev / std::sqrt(n);
  return s;
}

double censored_time(std::span<const double> curve, double threshold,
                     std::size_t stability_window, std::size_t half_window) {
  const auto t = time_to_threshold(curve, threshold, stability_window, half_window);
  return static_cast<double>(t ? *t : curve.size());
}

TransferReport transfer_report(const std::vector<RewardCurve>& baseline,
                               const std::vector<RewardCurve>& treated,
                               const ReportOptions& options) {
  check_sets(baseline, treated, "transfer_report");
  const std::size_t n = baseline.front().rewards.size();
  TransferReport r;
  r.jump_window = options.jump_window ? options.jump_window : percent_of(n, 0.10);
  r.stability_window = options.stability_window ? options.stability_window : percent_of(n, 0.05);
  if (options.threshold) {
    r.threshold = *options.threshold;
  } else {
    double acc = 0.0;
    for (const auto& c : baseline) acc += tail_mean(c.rewards, options.tail_fraction);
    r.threshold = acc / static_cast<double>(baseline.size());
  }

  std::vector<double> jump, gain, tb, tt;
  const std::size_t paired = std::min(baseline.size(), treated.size());
  for (std::size_t k = 0; k < paired; ++k) {
    const auto& b = baseline[k].rewards;
    const auto& t = treated[k].rewards;
    jump.push_back(head_mean(t, r.jump_window) - head_mean(b, r.jump_window));
    gain.push_back(tail_mean(t, options.tail_fraction) - tail_mean(b, options.tail_fraction));
  }
  for (const auto& c : baseline) {
    tb.push_back(censored_time(c.rewards, r.threshold, r.stability_window, options.half_window));
  }
  for (const auto& c : treated) {
    tt.push_back(censored_time(c.rewards, r.threshold, r.stability_window, options.half_window));
  }
  r.jump_start = summarize(std::move(jump));
  r.asymptotic_gain = summarize(std::move(gain));
  r.baseline_time = summarize(std::move(tb));
  r.treated_time = summarize(std::move(tt));
  r.time_reduction = r.baseline_time.mean > 0.0 ? 1.0 - r.treated_time.mean / r.baseline_time.mean
                                                : 0.0;
  return r;
}

}  // namespace distil::metrics
