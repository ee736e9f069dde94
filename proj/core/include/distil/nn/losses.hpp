#pragma once

#include <span>
#include <vector>

#include "distil/nn/matrix.hpp"

namespace distil::nn {

/// Probabilities are floored at this value before any logarithm.
inline constexpr double kProbabilityFloor = 1e-12;

struct LossResult {
  double value = 0.0;
  Matrix grad;  // dLoss / d(first argument)
};

/// Temperature softmax exp(z/T) / sum exp(z/T), computed with max subtraction.
std::vector<double> softmax_t(std::span<const double> logits, double temperature);
/// Column-wise softmax_t of a (classes x batch) matrix.
Matrix softmax_columns(const Matrix& logits, double temperature);

/// (1/n) * sum (a - b)^2 over every entry; gradient with respect to `a`.
LossResult mse_loss(const Matrix& a, const Matrix& b);

/// sum p log(p / q), with 0 log(0/q) = 0 and q floored at kProbabilityFloor.
double kl_divergence(std::span<const double> p, std::span<const double> q);

/// Batch mean of T^2 * KL(softmax_t(student) || softmax_t(teacher)).
/// The teacher is a constant; the gradient is with respect to student logits.
LossResult kd_loss(const Matrix& student_logits, const Matrix& teacher_logits, double temperature);

/// Batch mean of T^2 * H(softmax_t(teacher), softmax_t(student)), the
/// cross-entropy form of logit distillation.
LossResult ce_loss(const Matrix& student_logits, const Matrix& teacher_logits, double temperature);

}  // namespace distil::nn
