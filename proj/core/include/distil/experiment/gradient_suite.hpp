#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace distil::experiment {

inline constexpr double kGradientTolerance = 1e-4;

struct GradientCheckResult {
  std::string name;
  double max_error = 0.0;  // largest relative error over all checked entries
  bool passed = false;
};

/// Central finite-difference checks of every trainable path: the mimicking
/// losses through an actor, the actor path through the centralized critic,
/// the critic regression, and the attention critic (parameters, action input
/// and actor path).
std::vector<GradientCheckResult> run_gradient_suite(std::uint64_t seed = 7);

}  // namespace distil::experiment
