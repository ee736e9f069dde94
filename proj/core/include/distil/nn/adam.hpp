#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "distil/nn/matrix.hpp"
#include "distil/nn/mlp.hpp"

namespace distil::nn {

/// Bias-corrected adaptive-moment optimizer state. Moments are created lazily
/// on the first step, shaped like the parameters they track.
struct AdamState {
  std::vector<Matrix> first_moment;
  std::vector<Matrix> second_moment;
  std::uint64_t step_count = 0;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

void adam_step(std::span<Matrix* const> params, std::span<const Matrix* const> grads,
               AdamState& state);
void adam_step(MlpNet& net, const GradientSet& grads, AdamState& state);

/// Rescales `grads` in place so their joint L2 norm is at most `max_norm`.
/// Returns the norm before clipping.
double clip_grad_norm(std::span<Matrix* const> grads, double max_norm);

}  // namespace distil::nn
