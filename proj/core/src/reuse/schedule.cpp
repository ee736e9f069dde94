#include "distil/reuse/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "distil/errors.hpp"

namespace distil::reuse {

AlphaSchedule::AlphaSchedule(double alpha0, double beta, double floor)
    : alpha0_(alpha0), beta_(beta), floor_(floor) {
  if (!(alpha0 >= 0.0 && alpha0 <= 1.0)) throw ConfigError("knowru.alpha0 must lie in [0, 1]");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("knowru.beta must be >= 0");
  if (!(floor >= 0.0 && floor <= 1.0)) throw ConfigError("knowru.floor must lie in [0, 1]");
}

double AlphaSchedule::default_beta(double alpha0, double floor, std::size_t episodes) {
  if (alpha0 <= floor || episodes == 0) return 0.0;
  return (alpha0 - floor) / (0.8 * static_cast<double>(episodes));
}

double AlphaSchedule::alpha() const {
  if (alpha0_ <= floor_) return alpha0_;
  // Computed from the step count rather than accumulated, so the sequence is
  // exactly alpha0 - k * beta.
  return std::max(floor_, alpha0_ - static_cast<double>(steps_) * beta_);
}

double AlphaSchedule::step() {
  if (alpha() > floor_) ++steps_;
  return alpha();
}

std::string to_string(ScalerMode mode) {
  switch (mode) {
    case ScalerMode::none: return "none";
    case ScalerMode::fixed: return "static";
    case ScalerMode::dynamic: return "dynamic";
  }
  return "?";
}

ScalerMode scaler_mode_from_string(const std::string& name) {
  if (name == "none") return ScalerMode::none;
  if (name == "static") return ScalerMode::fixed;
  if (name == "dynamic") return ScalerMode::dynamic;
  throw ConfigError("unknown scaler mode '" + name + "' (expected none, static or dynamic)");
}

ReuseScaler::ReuseScaler(ScalerMode mode, double k) : mode_(mode), k_(k) {
  if (mode == ScalerMode::fixed && !(k > 0.0 && std::isfinite(k))) {
    throw ConfigError("knowru.scale_k must be positive");
  }
}

double ReuseScaler::factor(double reuse_loss, double q_loss) {
  switch (mode_) {
    case ScalerMode::none: return 1.0;
    case ScalerMode::fixed: return k_;
    case ScalerMode::dynamic: break;
  }
  mean_reuse_ = kDecay * mean_reuse_ + (1.0 - kDecay) * std::abs(reuse_loss);
  mean_q_ = kDecay * mean_q_ + (1.0 - kDecay) * std::abs(q_loss);
  correction_ *= kDecay;
  // Zero-started means divided by 1 - decay^k: every observation keeps its
  // exponential weight, including the first.
  const double debias = 1.0 - correction_;
  const double s = (mean_q_ / debias) / (mean_reuse_ / debias + kEpsilon);
  if (!std::isfinite(s)) return kMaxScale;
  return std::clamp(s, kMinScale, kMaxScale);
}

std::map<double, double> alpha_performance(const std::map<double, double>& times) {
  double t_max = 0.0;
  for (const auto& [alpha, t] : times) {
    if (!(t > 0.0)) throw ArgumentError("alpha_performance: times must be positive");
    t_max = std::max(t_max, t);
  }
  std::map<double, double> out;
  for (const auto& [alpha, t] : times) out[alpha] = std::log(t_max / t);
  return out;
}

}  // namespace distil::reuse
