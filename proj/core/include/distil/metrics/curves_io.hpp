#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "distil/metrics/metrics.hpp"

namespace distil::metrics {

/// Reads the `mean_reward` column of a run's curve.csv.
RewardCurve read_curve_csv(const std::filesystem::path& path);

/// Every `seed_<n>/curve.csv` under `dir`, ordered by seed.
std::vector<RewardCurve> read_run_set(const std::filesystem::path& dir);

/// report.csv: metric,baseline,treated,mean,stddev,ci95,per_seed
/// (per_seed values separated by ';').
std::string report_to_csv(const TransferReport& report, const std::string& baseline_label,
                          const std::string& treated_label);
void write_report_csv(const std::filesystem::path& path, const TransferReport& report,
                      const std::string& baseline_label, const std::string& treated_label);

}  // namespace distil::metrics
