#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "distil/nn/matrix.hpp"
#include "distil/rng.hpp"

namespace distil::nn {

enum class Activation { relu, tanh };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& name);

/// Parameter gradients shaped exactly like the owning network.
struct GradientSet {
  std::vector<Matrix> d_weights;
  std::vector<Matrix> d_biases;

  GradientSet& operator+=(const GradientSet& other);
  GradientSet& operator*=(double scalar);
  /// Flat view in the same order as MlpNet::parameters(): W0, b0, W1, b1, ...
  std::vector<Matrix*> refs();
  std::vector<const Matrix*> refs() const;
};

/// Fully connected network. Hidden layers apply `activation`; the last layer
/// emits raw logits.
class MlpNet {
 public:
  MlpNet() = default;
  /// All parameters zero.
  MlpNet(std::vector<std::size_t> layer_sizes, Activation activation);

  /// Uniform(-l, l) weights with l = sqrt(6 / (fan_in + fan_out)), zero biases.
  static MlpNet glorot(std::vector<std::size_t> layer_sizes, Activation activation, Rng& rng);

  /// Computes logits of shape (output_size, batch) and caches activations.
  Matrix forward(const Matrix& input);
  /// Same arithmetic as forward() without touching the cache.
  Matrix evaluate(const Matrix& input) const;

  /// Reverse pass for the most recent forward(). When `input_grad` is given it
  /// receives dLoss/dInput.
  GradientSet backward(const Matrix& output_grad, Matrix* input_grad = nullptr) const;

  bool has_cache() const { return !activations_.empty(); }
  void clear_cache() { activations_.clear(); }
  /// Post-activation outputs of the last forward(): index 0 is the input.
  const std::vector<Matrix>& cached_activations() const { return activations_; }
  /// Pre-activations of hidden layers for `input` (used to detect relu kinks).
  std::vector<Matrix> hidden_preactivations(const Matrix& input) const;

  const std::vector<std::size_t>& layer_sizes() const { return layer_sizes_; }
  std::size_t input_size() const { return layer_sizes_.front(); }
  std::size_t output_size() const { return layer_sizes_.back(); }
  std::size_t num_layers() const { return weights_.size(); }
  Activation activation() const { return activation_; }

  std::vector<Matrix>& weights() { return weights_; }
  const std::vector<Matrix>& weights() const { return weights_; }
  std::vector<Matrix>& biases() { return biases_; }
  const std::vector<Matrix>& biases() const { return biases_; }

  std::vector<Matrix*> parameters();
  std::vector<const Matrix*> parameters() const;
  GradientSet zero_gradients() const;
  std::size_t parameter_count() const;

  bool same_architecture(const MlpNet& other) const {
    return layer_sizes_ == other.layer_sizes_ && activation_ == other.activation_;
  }
  /// Parameters equal bit for bit (cache ignored).
  bool same_parameters(const MlpNet& other) const;

 private:
  Matrix affine(std::size_t layer, const Matrix& x) const;
  void activate(Matrix& z) const;
  void check_input(const Matrix& input) const;

  std::vector<std::size_t> layer_sizes_;
  Activation activation_ = Activation::relu;
  std::vector<Matrix> weights_;
  std::vector<Matrix> biases_;
  std::vector<Matrix> activations_;
};

void require_congruent(const MlpNet& net, const GradientSet& grads);

}  // namespace distil::nn
