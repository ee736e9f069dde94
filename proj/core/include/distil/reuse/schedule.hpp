#pragma once

#include <cstddef>
#include <map>
#include <string>

namespace distil::reuse {

/// Linear decay of the blend weight: alpha_k = max(floor, alpha0 - k * beta)
/// after k steps. A schedule that starts at or below the floor stays at alpha0.
class AlphaSchedule {
 public:
  AlphaSchedule(double alpha0, double beta, double floor);

  /// beta that reaches the floor after 80% of `episodes`.
  static double default_beta(double alpha0, double floor, std::size_t episodes);

  double alpha() const;
  /// One episode's decrement; returns the new alpha.
  double step();
  std::size_t steps() const { return steps_; }

  double alpha0() const { return alpha0_; }
  double beta() const { return beta_; }
  double floor() const { return floor_; }

 private:
  double alpha0_;
  double beta_;
  double floor_;
  std::size_t steps_ = 0;
};

enum class ScalerMode { none, fixed, dynamic };
std::string to_string(ScalerMode mode);
/// Accepts none, static, dynamic. ConfigError otherwise.
ScalerMode scaler_mode_from_string(const std::string& name);

/// Brings L_reuse to the magnitude of L_Q.
///
/// dynamic: s = mean|L_Q| / (mean|L_reuse| + eps), clipped to [1e-3, 1e3], with
/// bias-corrected exponential running means (decay 0.99) updated before s is
/// computed.
class ReuseScaler {
 public:
  static constexpr double kDecay = 0.99;
  static constexpr double kEpsilon = 1e-8;
  static constexpr double kMinScale = 1e-3;
  static constexpr double kMaxScale = 1e3;

  explicit ReuseScaler(ScalerMode mode = ScalerMode::dynamic, double k = 1.0);

  /// Updates the running means and returns the factor applied to L_reuse and
  /// its gradient.
  double factor(double reuse_loss, double q_loss);
  double scale(double reuse_loss, double q_loss) { return factor(reuse_loss, q_loss) * reuse_loss; }

  ScalerMode mode() const { return mode_; }

 private:
  ScalerMode mode_;
  double k_;
  double mean_reuse_ = 0.0;
  double mean_q_ = 0.0;
  double correction_ = 1.0;  // decay^k after k observations
};

/// alpha * reuse + (1 - alpha) * q
inline double blend(double alpha, double scaled_reuse, double q_loss) {
  return alpha * scaled_reuse + (1.0 - alpha) * q_loss;
}

/// ln(T_max / T_alpha) per entry, T_max the largest time. ArgumentError when
/// any time is not positive.
std::map<double, double> alpha_performance(const std::map<double, double>& times);

}  // namespace distil::reuse
