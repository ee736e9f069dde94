#include "distil/nn/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "distil/errors.hpp"

namespace distil::nn {

namespace {

void require_temperature(double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw ArgumentError("temperature must be positive and finite, got " +
                        std::to_string(temperature));
  }
}

void softmax_into(const double* z, std::size_t n, std::size_t stride, double temperature,
                  double* out) {
  double max_z = z[0];
  for (std::size_t k = 1; k < n; ++k) max_z = std::max(max_z, z[k * stride]);
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = std::exp((z[k * stride] - max_z) / temperature);
    total += out[k];
  }
  for (std::size_t k = 0; k < n; ++k) out[k] /= total;
}

double kl_unchecked(std::span<const double> p, std::span<const double> q) {
  double acc = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] > 0.0) acc += p[k] * (std::log(p[k]) - std::log(std::max(q[k], kProbabilityFloor)));
  }
  return acc;
}

void require_distribution(std::span<const double> p, const char* name) {
  double total = 0.0;
  for (double v : p) {
    if (v < 0.0 || !std::isfinite(v)) {
      throw ArgumentError(std::string("kl_divergence: ") + name + " has a negative or non-finite entry");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ArgumentError(std::string("kl_divergence: ") + name + " does not sum to 1");
  }
}

}  // namespace

std::vector<double> softmax_t(std::span<const double> logits, double temperature) {
  require_temperature(temperature);
  if (logits.empty()) throw ArgumentError("softmax_t: empty logits");
  std::vector<double> out(logits.size());
  softmax_into(logits.data(), logits.size(), 1, temperature, out.data());
  return out;
}

Matrix softmax_columns(const Matrix& logits, double temperature) {
  require_temperature(temperature);
  const std::size_t n = logits.rows();
  Matrix out(n, logits.cols());
  std::vector<double> buf(n);
  for (std::size_t c = 0; c < logits.cols(); ++c) {
    softmax_into(logits.data() + c, n, logits.cols(), temperature, buf.data());
    for (std::size_t k = 0; k < n; ++k) out(k, c) = buf[k];
  }
  return out;
}

LossResult mse_loss(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "mse_loss");
  if (a.empty()) throw DimensionError("mse_loss: empty input");
  const double n = static_cast<double>(a.size());
  LossResult r;
  r.grad = Matrix(a.rows(), a.cols());
  auto av = a.values();
  auto bv = b.values();
  auto gv = r.grad.values();
  double acc = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) {
    const double d = av[i] - bv[i];
    acc += d * d;
    gv[i] = 2.0 * d / n;
  }
  r.value = acc / n;
  return r;
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size() || p.empty()) {
    throw DimensionError("kl_divergence: distributions differ in length or are empty");
  }
  require_distribution(p, "p");
  require_distribution(q, "q");
  return kl_unchecked(p, q);
}

LossResult kd_loss(const Matrix& student_logits, const Matrix& teacher_logits, double temperature) {
  require_same_shape(student_logits, teacher_logits, "kd_loss");
  require_temperature(temperature);
  if (student_logits.empty()) throw DimensionError("kd_loss: empty input");
  const Matrix ps = softmax_columns(student_logits, temperature);
  const Matrix pt = softmax_columns(teacher_logits, temperature);
  const std::size_t n = ps.rows();
  const std::size_t batch = ps.cols();
  const double t2 = temperature * temperature;

  LossResult r;
  r.grad = Matrix(n, batch);
  std::vector<double> p(n), q(n);
  double total = 0.0;
  for (std::size_t c = 0; c < batch; ++c) {
    for (std::size_t k = 0; k < n; ++k) {
      p[k] = ps(k, c);
      q[k] = pt(k, c);
    }
    const double kl = kl_unchecked(p, q);
    total += kl;
    for (std::size_t k = 0; k < n; ++k) {
      if (p[k] > 0.0) {
        const double log_ratio = std::log(p[k]) - std::log(std::max(q[k], kProbabilityFloor));
        r.grad(k, c) = temperature * p[k] * (log_ratio - kl) / static_cast<double>(batch);
      }
    }
  }
  r.value = t2 * total / static_cast<double>(batch);
  return r;
}

LossResult ce_loss(const Matrix& student_logits, const Matrix& teacher_logits, double temperature) {
  require_same_shape(student_logits, teacher_logits, "ce_loss");
  require_temperature(temperature);
  if (student_logits.empty()) throw DimensionError("ce_loss: empty input");
  const Matrix ps = softmax_columns(student_logits, temperature);
  const Matrix pt = softmax_columns(teacher_logits, temperature);
  const std::size_t batch = ps.cols();
  const double t2 = temperature * temperature;

  LossResult r;
  r.grad = Matrix(ps.rows(), batch);
  double total = 0.0;
  for (std::size_t c = 0; c < batch; ++c) {
    for (std::size_t k = 0; k < ps.rows(); ++k) {
      total -= pt(k, c) * std::log(std::max(ps(k, c), kProbabilityFloor));
      r.grad(k, c) = temperature * (ps(k, c) - pt(k, c)) / static_cast<double>(batch);
    }
  }
  r.value = t2 * total / static_cast<double>(batch);
  return r;
}

}  // namespace distil::nn
