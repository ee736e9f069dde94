#include "distil/nn/mlp.hpp"

#include <cmath>

#include "distil/errors.hpp"

namespace distil::nn {

std::string to_string(Activation a) { return a == Activation::relu ? "relu" : "tanh"; }

Activation activation_from_string(const std::string& name) {
  if (name == "relu") return Activation::relu;
  if (name == "tanh") return Activation::tanh;
  throw ArgumentError("unknown activation '" + name + "'");
}

GradientSet& GradientSet::operator+=(const GradientSet& other) {
  if (d_weights.size() != other.d_weights.size()) {
    throw DimensionError("GradientSet: layer count mismatch");
  }
  for (std::size_t k = 0; k < d_weights.size(); ++k) {
    d_weights[k] += other.d_weights[k];
    d_biases[k] += other.d_biases[k];
  }
  return *this;
}

GradientSet& GradientSet::operator*=(double scalar) {
  for (std::size_t k = 0; k < d_weights.size(); ++k) {
    d_weights[k] *= scalar;
    d_biases[k] *= scalar;
  }
  return *this;
}

std::vector<Matrix*> GradientSet::refs() {
  std::vector<Matrix*> out;
  for (std::size_t k = 0; k < d_weights.size(); ++k) {
    out.push_back(&d_weights[k]);
    out.push_back(&d_biases[k]);
  }
  return out;
}

std::vector<const Matrix*> GradientSet::refs() const {
  std::vector<const Matrix*> out;
  for (std::size_t k = 0; k < d_weights.size(); ++k) {
    out.push_back(&d_weights[k]);
    out.push_back(&d_biases[k]);
  }
  return out;
}

MlpNet::MlpNet(std::vector<std::size_t> layer_sizes, Activation activation)
    : layer_sizes_(std::move(layer_sizes)), activation_(activation) {
  if (layer_sizes_.size() < 2) throw ArgumentError("MlpNet needs at least two layer sizes");
  for (std::size_t s : layer_sizes_) {
    if (s == 0) throw ArgumentError("MlpNet layer sizes must be positive");
  }
  for (std::size_t k = 0; k + 1 < layer_sizes_.size(); ++k) {
    weights_.emplace_back(layer_sizes_[k + 1], layer_sizes_[k]);
    biases_.emplace_back(layer_sizes_[k + 1], 1);
  }
}

MlpNet MlpNet::glorot(std::vector<std::size_t> layer_sizes, Activation activation, Rng& rng) {
  MlpNet net(std::move(layer_sizes), activation);
  for (auto& w : net.weights_) {
    const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (double& v : w.values()) v = dist(rng);
  }
  return net;
}

void MlpNet::check_input(const Matrix& input) const {
  if (weights_.empty()) throw StateError("MlpNet: network has no layers");
  if (input.rows() != input_size() || input.cols() == 0) {
    throw DimensionError("MlpNet: input " + input.shape_string() + " but network expects " +
                         std::to_string(input_size()) + " rows and a nonempty batch");
  }
}

Matrix MlpNet::affine(std::size_t layer, const Matrix& x) const {
  Matrix z = matmul(weights_[layer], x);
  add_column_broadcast(z, biases_[layer]);
  return z;
}

void MlpNet::activate(Matrix& z) const {
  if (activation_ == Activation::relu) {
    for (double& v : z.values()) v = v > 0.0 ? v : 0.0;
  } else {
    for (double& v : z.values()) v = std::tanh(v);
  }
}

Matrix MlpNet::forward(const Matrix& input) {
  check_input(input);
  activations_.clear();
  activations_.push_back(input);
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    Matrix z = affine(k, activations_.back());
    if (k + 1 == weights_.size()) return z;
    activate(z);
    activations_.push_back(std::move(z));
  }
  return {};
}

Matrix MlpNet::evaluate(const Matrix& input) const {
  check_input(input);
  Matrix x = input;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    x = affine(k, x);
    if (k + 1 < weights_.size()) activate(x);
  }
  return x;
}

std::vector<Matrix> MlpNet::hidden_preactivations(const Matrix& input) const {
  check_input(input);
  std::vector<Matrix> out;
  Matrix x = input;
  for (std::size_t k = 0; k + 1 < weights_.size(); ++k) {
    x = affine(k, x);
    out.push_back(x);
    activate(x);
  }
  return out;
}

GradientSet MlpNet::backward(const Matrix& output_grad, Matrix* input_grad) const {
  if (activations_.empty()) throw StateError("MlpNet::backward called before forward");
  const std::size_t batch = activations_.front().cols();
  if (output_grad.rows() != output_size() || output_grad.cols() != batch) {
    throw DimensionError("MlpNet::backward: gradient " + output_grad.shape_string() +
                         " does not match logits (" + std::to_string(output_size()) + "x" +
                         std::to_string(batch) + ")");
  }
  GradientSet grads;
  grads.d_weights.resize(weights_.size());
  grads.d_biases.resize(weights_.size());

  Matrix delta = output_grad;
  for (std::size_t k = weights_.size(); k-- > 0;) {
    const Matrix& x = activations_[k];
    grads.d_weights[k] = matmul_nt(delta, x);
    grads.d_biases[k] = row_sums(delta);
    if (k == 0 && input_grad == nullptr) break;
    Matrix dx = matmul_tn(weights_[k], delta);
    if (k == 0) {
      *input_grad = std::move(dx);
      break;
    }
    // x is the post-activation output of hidden layer k-1.
    auto dv = dx.values();
    auto xv = x.values();
    if (activation_ == Activation::relu) {
      for (std::size_t i = 0; i < dv.size(); ++i)
        if (!(xv[i] > 0.0)) dv[i] = 0.0;
    } else {
      for (std::size_t i = 0; i < dv.size(); ++i) dv[i] *= 1.0 - xv[i] * xv[i];
    }
    delta = std::move(dx);
  }
  return grads;
}

std::vector<Matrix*> MlpNet::parameters() {
  std::vector<Matrix*> out;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    out.push_back(&weights_[k]);
    out.push_back(&biases_[k]);
  }
  return out;
}

std::vector<const Matrix*> MlpNet::parameters() const {
  std::vector<const Matrix*> out;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    out.push_back(&weights_[k]);
    out.push_back(&biases_[k]);
  }
  return out;
}

GradientSet MlpNet::zero_gradients() const {
  GradientSet g;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    g.d_weights.emplace_back(weights_[k].rows(), weights_[k].cols());
    g.d_biases.emplace_back(biases_[k].rows(), 1);
  }
  return g;
}

std::size_t MlpNet::parameter_count() const {
  std::size_t n = 0;
  for (const auto* p : parameters()) n += p->size();
  return n;
}

bool MlpNet::same_parameters(const MlpNet& other) const {
  return same_architecture(other) && weights_ == other.weights_ && biases_ == other.biases_;
}

void require_congruent(const MlpNet& net, const GradientSet& grads) {
  if (grads.d_weights.size() != net.num_layers() || grads.d_biases.size() != net.num_layers()) {
    throw DimensionError("GradientSet layer count does not match network");
  }
  for (std::size_t k = 0; k < net.num_layers(); ++k) {
    require_same_shape(net.weights()[k], grads.d_weights[k], "GradientSet weights");
    require_same_shape(net.biases()[k], grads.d_biases[k], "GradientSet biases");
  }
}

}  // namespace distil::nn
