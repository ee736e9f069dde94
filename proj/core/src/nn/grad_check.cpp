#include "distil/nn/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "distil/errors.hpp"

namespace distil::nn {

double relative_error(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / scale;
}

double check_gradients(std::span<Matrix* const> params, std::span<const Matrix* const> analytic,
                       const std::function<double()>& loss, double step) {
  if (params.size() != analytic.size()) {
    throw DimensionError("check_gradients: parameter/gradient count mismatch");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    require_same_shape(*params[i], *analytic[i], "check_gradients");
    auto p = params[i]->values();
    auto g = analytic[i]->values();
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double original = p[j];
      p[j] = original + step;
      const double plus = loss();
      p[j] = original - step;
      const double minus = loss();
      p[j] = original;
      const double numeric = (plus - minus) / (2.0 * step);
      worst = std::max(worst, relative_error(g[j], numeric));
    }
  }
  return worst;
}

double grad_check(MlpNet& net, const LogitLoss& loss, const Matrix& input, double step) {
  const Matrix logits = net.forward(input);
  const LossResult r = loss(logits);
  const GradientSet grads = net.backward(r.grad);
  const auto params = net.parameters();
  const auto grad_refs = grads.refs();
  return check_gradients(params, grad_refs, [&] { return loss(net.evaluate(input)).value; },
                         step);
}

double kink_margin(const MlpNet& net, const Matrix& input) {
  if (net.activation() != Activation::relu) return std::numeric_limits<double>::infinity();
  double margin = std::numeric_limits<double>::infinity();
  for (const Matrix& z : net.hidden_preactivations(input)) {
    for (double v : z.values()) margin = std::min(margin, std::abs(v));
  }
  return margin;
}

}  // namespace distil::nn
