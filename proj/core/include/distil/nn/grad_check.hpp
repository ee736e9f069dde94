#pragma once

#include <functional>
#include <span>

#include "distil/nn/losses.hpp"
#include "distil/nn/matrix.hpp"
#include "distil/nn/mlp.hpp"

namespace distil::nn {

inline constexpr double kFiniteDifferenceStep = 1e-5;

/// |a - n| / max(|a|, |n|, 1e-8)
double relative_error(double analytic, double numeric);

/// Compares analytic gradients with central differences of `loss` taken by
/// perturbing every entry of every parameter. Parameters are restored.
/// Returns the largest relative error.
double check_gradients(std::span<Matrix* const> params, std::span<const Matrix* const> analytic,
                       const std::function<double()>& loss, double step = kFiniteDifferenceStep);

/// A scalar loss of network logits together with its logit gradient.
using LogitLoss = std::function<LossResult(const Matrix& logits)>;

/// Backpropagates `loss` through `net` at `input` and checks every parameter
/// against central differences.
double grad_check(MlpNet& net, const LogitLoss& loss, const Matrix& input,
                  double step = kFiniteDifferenceStep);

/// Smallest |pre-activation| over hidden relu units at `input`; infinity for
/// tanh networks. Finite differences are unreliable when this is tiny.
double kink_margin(const MlpNet& net, const Matrix& input);

}  // namespace distil::nn
