#include "distil/metrics/curves_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "distil/errors.hpp"
#include "distil/nn/snapshot.hpp"

namespace distil::metrics {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  return out;
}

void add_row(std::ostringstream& out, const std::string& metric, const std::string& baseline,
             const std::string& treated, const Summary& s) {
  out << metric << ',' << baseline << ',' << treated << ',' << nn::format_real(s.mean) << ','
      << nn::format_real(s.stddev) << ',' << nn::format_real(s.ci_half_width) << ',';
  for (std::size_t k = 0; k < s.values.size(); ++k) {
    if (k) out << ';';
    out << nn::format_real(s.values[k]);
  }
  out << '\n';
}

void add_scalar(std::ostringstream& out, const std::string& metric, const std::string& baseline,
                const std::string& treated, double value) {
  out << metric << ',' << baseline << ',' << treated << ',' << nn::format_real(value)
      << ",0,0,\n";
}

}  // namespace

RewardCurve read_curve_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
  const auto header = split(line, ',');
  const auto it = std::find(header.begin(), header.end(), "mean_reward");
  if (it == header.end()) throw IoError(path.string() + ": no mean_reward column");
  const auto column = static_cast<std::size_t>(it - header.begin());
  RewardCurve curve;
  curve.label = path.parent_path().filename().string();
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != header.size()) {
      throw IoError(path.string() + ": row " + std::to_string(row) + " has wrong field count");
    }
    try {
      curve.rewards.push_back(nn::parse_real(fields[column]));
    } catch (const std::exception&) {
      throw IoError(path.string() + ": bad number on row " + std::to_string(row));
    }
  }
  return curve;
}

std::vector<RewardCurve> read_run_set(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<RewardCurve> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (!entry.is_directory() || name.rfind("seed_", 0) != 0) continue;
    const auto csv = entry.path() / "curve.csv";
    if (!std::filesystem::exists(csv)) continue;
    RewardCurve c = read_curve_csv(csv);
    try {
      c.seed = std::stoull(name.substr(5));
    } catch (const std::logic_error&) {
      continue;
    }
    out.push_back(std::move(c));
  }
  if (out.empty()) throw IoError("no seed_*/curve.csv under " + dir.string());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.seed < b.seed; });
  return out;
}

std::string report_to_csv(const TransferReport& report, const std::string& baseline_label,
                          const std::string& treated_label) {
  std::ostringstream out;
  out << "metric,baseline,treated,mean,stddev,ci95,per_seed\n";
  add_row(out, "jump_start", baseline_label, treated_label, report.jump_start);
  add_row(out, "asymptotic_performance", baseline_label, treated_label, report.asymptotic_gain);
  add_row(out, "time_to_threshold_baseline", baseline_label, treated_label, report.baseline_time);
  add_row(out, "time_to_threshold_treated", baseline_label, treated_label, report.treated_time);
  add_scalar(out, "time_to_threshold_reduction", baseline_label, treated_label,
             report.time_reduction);
  add_scalar(out, "threshold", baseline_label, treated_label, report.threshold);
  return out.str();
}

void write_report_csv(const std::filesystem::path& path, const TransferReport& report,
                      const std::string& baseline_label, const std::string& treated_label) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << report_to_csv(report, baseline_label, treated_label);
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace distil::metrics
