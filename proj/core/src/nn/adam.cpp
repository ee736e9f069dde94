#include "distil/nn/adam.hpp"

#include <cmath>

#include "distil/errors.hpp"

namespace distil::nn {

void adam_step(std::span<Matrix* const> params, std::span<const Matrix* const> grads,
               AdamState& state) {
  if (params.size() != grads.size()) {
    throw DimensionError("adam_step: parameter/gradient count mismatch");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    require_same_shape(*params[i], *grads[i], "adam_step");
  }
  if (state.first_moment.empty()) {
    for (const Matrix* p : params) {
      state.first_moment.emplace_back(p->rows(), p->cols());
      state.second_moment.emplace_back(p->rows(), p->cols());
    }
  } else if (state.first_moment.size() != params.size()) {
    throw DimensionError("adam_step: optimizer state tracks a different parameter set");
  }

  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const double correction1 = 1.0 - std::pow(state.beta1, t);
  const double correction2 = 1.0 - std::pow(state.beta2, t);

  for (std::size_t i = 0; i < params.size(); ++i) {
    require_same_shape(*params[i], state.first_moment[i], "adam_step moments");
    auto p = params[i]->values();
    auto g = grads[i]->values();
    auto m = state.first_moment[i].values();
    auto v = state.second_moment[i].values();
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = state.beta1 * m[j] + (1.0 - state.beta1) * g[j];
      v[j] = state.beta2 * v[j] + (1.0 - state.beta2) * g[j] * g[j];
      const double m_hat = m[j] / correction1;
      const double v_hat = v[j] / correction2;
      p[j] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
  }
}

void adam_step(MlpNet& net, const GradientSet& grads, AdamState& state) {
  require_congruent(net, grads);
  const auto params = net.parameters();
  const auto grad_refs = grads.refs();
  adam_step(params, grad_refs, state);
}

double clip_grad_norm(std::span<Matrix* const> grads, double max_norm) {
  double sq = 0.0;
  for (const Matrix* g : grads) sq += g->squared_norm();
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double s = max_norm / norm;
    for (Matrix* g : grads) *g *= s;
  }
  return norm;
}

}  // namespace distil::nn
