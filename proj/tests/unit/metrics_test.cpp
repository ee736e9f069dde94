#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "distil/errors.hpp"
#include "distil/metrics/curves_io.hpp"
#include "distil/metrics/metrics.hpp"

using namespace distil;
using namespace distil::metrics;

namespace {

std::vector<RewardCurve> random_set(std::size_t seeds, std::size_t length, std::uint64_t seed,
                                    double shift = 0.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<RewardCurve> out;
  for (std::size_t s = 0; s < seeds; ++s) {
    RewardCurve c;
    c.seed = s;
    for (std::size_t e = 0; e < length; ++e) c.rewards.push_back(n(rng) + shift);
    out.push_back(c);
  }
  return out;
}

std::vector<RewardCurve> shifted(std::vector<RewardCurve> set, double by) {
  for (auto& c : set)
    for (double& r : c.rewards) r += by;
  return set;
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Convolution oracle: extend the curve by mirror images, then apply the
// normalized triangle kernel.
std::vector<double> smooth_oracle(const std::vector<double>& c, std::size_t h) {
  const std::size_t n = c.size();
  const int copies = static_cast<int>(h / n) + 2;  // even count on each side
  std::vector<double> ext;
  for (int copy = -2 * copies; copy <= 2 * copies; ++copy) {
    for (std::size_t k = 0; k < n; ++k) ext.push_back(copy % 2 == 0 ? c[k] : c[n - 1 - k]);
  }
  const std::size_t base = 2 * static_cast<std::size_t>(copies) * n;
  std::vector<double> kernel;
  double total = 0.0;
  for (std::size_t k = 0; k <= 2 * h; ++k) {
    const double w = static_cast<double>(h + 1) - std::abs(static_cast<double>(k) - static_cast<double>(h));
    kernel.push_back(w);
    total += w;
  }
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k <= 2 * h; ++k) out[i] += kernel[k] / total * ext[base + i + k - h];
  return out;
}

}  // namespace

TEST(Smooth, IdentityAndConstants) {
  const std::vector<double> c{1.0, -2.0, 3.5, 0.0};
  EXPECT_EQ(smooth(c, 0), c);
  const std::vector<double> flat(30, 2.5);
  for (double v : smooth(flat, 4)) EXPECT_NEAR(v, 2.5, 1e-14);
}

TEST(Smooth, ImpulseSpreadsTriangularly) {
  std::vector<double> impulse(41, 0.0);
  impulse[20] = 1.0;
  const auto s = smooth(impulse, 3);
  for (std::size_t i = 0; i < 41; ++i) {
    const double d = std::abs(static_cast<double>(i) - 20.0);
    EXPECT_NEAR(s[i], d <= 3.0 ? (4.0 - d) / 16.0 : 0.0, 1e-15);
  }
  EXPECT_NEAR(mean(s), mean(impulse), 1e-15);
}

TEST(Smooth, MatchesConvolutionOracleAndKeepsMean) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  for (std::size_t len : {1u, 2u, 7u, 50u, 333u}) {
    std::vector<double> c(len);
    for (double& v : c) v = n(rng);
    for (std::size_t h : {1u, 2u, 5u, 10u}) {
      const auto s = smooth(c, h);
      const auto o = smooth_oracle(c, h);
      for (std::size_t i = 0; i < len; ++i) EXPECT_NEAR(s[i], o[i], 1e-12);
      EXPECT_NEAR(mean(s), mean(c), 1e-9);
    }
  }
}

TEST(JumpStart, Examples) {
  const auto base = random_set(5, 100, 1);
  EXPECT_EQ(jump_start(base, base, 10), 0.0);
  EXPECT_NEAR(jump_start(base, shifted(base, 5.0), 10), 5.0, 1e-12);
  EXPECT_THROW(jump_start({}, base, 10), ArgumentError);
  EXPECT_THROW(jump_start(base, base, 101), ArgumentError);
}

TEST(JumpStart, MatchesLoopOracle) {
  const auto base = random_set(4, 60, 2);
  const auto treated = random_set(3, 60, 3);
  double b = 0.0, t = 0.0;
  for (const auto& c : base) {
    double s = 0.0;
    for (std::size_t e = 0; e < 7; ++e) s += c.rewards[e];
    b += s / 7.0;
  }
  for (const auto& c : treated) {
    double s = 0.0;
    for (std::size_t e = 0; e < 7; ++e) s += c.rewards[e];
    t += s / 7.0;
  }
  EXPECT_NEAR(jump_start(base, treated, 7), t / 3.0 - b / 4.0, 1e-12);
}

TEST(Asymptotic, ExamplesAndOracle) {
  const auto base = random_set(5, 100, 4);
  EXPECT_EQ(asymptotic_performance(base, base), 0.0);
  EXPECT_NEAR(asymptotic_performance(base, shifted(base, 3.0)), 3.0, 1e-12);
  const auto treated = random_set(5, 100, 5);
  double diff = 0.0;
  for (std::size_t s = 0; s < 5; ++s) {
    double bt = 0.0, tt = 0.0;
    for (std::size_t e = 75; e < 100; ++e) {
      bt += base[s].rewards[e];
      tt += treated[s].rewards[e];
    }
    diff += (tt - bt) / 25.0;
  }
  EXPECT_NEAR(asymptotic_performance(base, treated, 0.25), diff / 5.0, 1e-12);
  EXPECT_THROW(asymptotic_performance(base, treated, 0.0), ArgumentError);
}

TEST(TimeToThreshold, Examples) {
  const std::vector<double> high(50, 3.0);
  EXPECT_EQ(time_to_threshold(high, 1.0, 5), 0u);
  const std::vector<double> low(50, -1.0);
  EXPECT_FALSE(time_to_threshold(low, 0.0, 5).has_value());
  std::vector<double> ramp(300);
  for (std::size_t e = 0; e < 300; ++e) ramp[e] = static_cast<double>(e) / 200.0;
  EXPECT_EQ(time_to_threshold(ramp, 0.5, 10), 100u);
  // A dip resets the stability run.
  std::vector<double> dip(30, 1.0);
  dip[5] = 0.0;
  EXPECT_EQ(time_to_threshold(dip, 0.5, 10), 6u);
  EXPECT_FALSE(time_to_threshold(std::vector<double>(9, 1.0), 0.5, 10).has_value());
}

TEST(TimeToThreshold, MonotoneInThreshold) {
  const auto set = random_set(1, 400, 6, 0.0);
  std::vector<double> c = set[0].rewards;
  for (std::size_t e = 0; e < c.size(); ++e) c[e] += static_cast<double>(e) / 100.0;
  std::size_t last = 0;
  for (double thr = -1.0; thr < 5.0; thr += 0.05) {
    const auto t = time_to_threshold(c, thr, 8, 5);
    if (!t) {
      last = c.size();
      continue;
    }
    EXPECT_LE(last, *t);
    EXPECT_LT(last, c.size());
    last = *t;
  }
}

TEST(Summary, SampleStatistics) {
  const Summary s = summarize({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_DOUBLE_EQ(s.stddev, std::sqrt(5.0 / 3.0));
  EXPECT_DOUBLE_EQ(s.ci_half_width, 1.96 * std::sqrt(5.0 / 3.0) / 2.0);
  EXPECT_EQ(summarize({7.0}).stddev, 0.0);
}

TEST(TransferReport, IdenticalSetsAreZero) {
  const auto base = random_set(5, 200, 7);
  const TransferReport r = transfer_report(base, base);
  EXPECT_EQ(r.jump_start.mean, 0.0);
  EXPECT_EQ(r.asymptotic_gain.mean, 0.0);
  EXPECT_EQ(r.time_reduction, 0.0);
  EXPECT_EQ(r.jump_window, 20u);
  EXPECT_EQ(r.stability_window, 10u);
}

TEST(TransferReport, AdditiveUnderShift) {
  const auto base = random_set(5, 200, 8);
  const auto treated = random_set(5, 200, 9);
  const TransferReport a = transfer_report(base, treated);
  const TransferReport b = transfer_report(base, shifted(treated, 1.25));
  EXPECT_NEAR(b.jump_start.mean - a.jump_start.mean, 1.25, 1e-12);
  EXPECT_NEAR(b.asymptotic_gain.mean - a.asymptotic_gain.mean, 1.25, 1e-12);
}

TEST(TransferReport, FasterTreatedRunsReduceTime) {
  std::vector<RewardCurve> base, treated;
  for (std::size_t s = 0; s < 3; ++s) {
    RewardCurve b, t;
    for (std::size_t e = 0; e < 100; ++e) {
      b.rewards.push_back(std::min(1.0, static_cast<double>(e) / 80.0));
      t.rewards.push_back(std::min(1.0, static_cast<double>(e) / 40.0));
    }
    base.push_back(b);
    treated.push_back(t);
  }
  ReportOptions opt;
  opt.half_window = 0;
  opt.threshold = 0.5;
  opt.stability_window = 5;
  const TransferReport r = transfer_report(base, treated, opt);
  EXPECT_EQ(r.baseline_time.mean, 40.0);
  EXPECT_EQ(r.treated_time.mean, 20.0);
  EXPECT_DOUBLE_EQ(r.time_reduction, 0.5);
  EXPECT_EQ(censored_time(std::vector<double>(10, 0.0), 1.0, 2, 0), 10.0);
}

TEST(CurvesIo, ReadsRunSetsAndWritesReport) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "distil_metrics_io";
  fs::remove_all(dir);
  for (int s : {3, 1}) {
    fs::create_directories(dir / ("seed_" + std::to_string(s)));
    std::ofstream(dir / ("seed_" + std::to_string(s)) / "curve.csv")
        << "episode,mean_reward,reward_0,q_loss\n0," << s << ",0,0\n1,-0.5,0,0\n";
  }
  const auto set = read_run_set(dir);
  ASSERT_EQ(set.size(), 2u);
  EXPECT_EQ(set[0].seed, 1u);
  EXPECT_EQ(set[1].rewards, (std::vector<double>{3.0, -0.5}));
  EXPECT_THROW(read_run_set(dir / "missing"), IoError);

  ReportOptions opt;
  opt.half_window = 0;
  const std::string csv = report_to_csv(transfer_report(set, set, opt), "a", "b");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "metric,baseline,treated,mean,stddev,ci95,per_seed");
  EXPECT_NE(csv.find("\njump_start,a,b,0,0,0,0;0\n"), std::string::npos);
}
