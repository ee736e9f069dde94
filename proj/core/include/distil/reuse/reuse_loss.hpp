#pragma once

#include <string>

#include "distil/nn/losses.hpp"
#include "distil/nn/mlp.hpp"
#include "distil/reuse/adapter.hpp"
#include "distil/reuse/teacher.hpp"

namespace distil::reuse {

enum class LossKind { mse, kd_kl, ce };
std::string to_string(LossKind kind);
/// ConfigError for an unknown name.
LossKind loss_kind_from_string(const std::string& name);

/// Mimicking loss between student and teacher logits, both (5 x B).
/// mse ignores the temperature. The gradient is with respect to the student.
nn::LossResult reuse_loss_from_logits(const nn::Matrix& student_logits,
                                      const nn::Matrix& teacher_logits, LossKind kind,
                                      double temperature = 1.0);

struct ReuseResult {
  double value = 0.0;
  nn::Matrix logit_grad;      // dL_reuse / d(student logits)
  nn::Matrix student_logits;  // the student forward is cached for backward()
};

/// Runs the student forward on `observations` (student layout, one column per
/// sample) and the teacher on their adapted copies.
ReuseResult reuse_loss(const TeacherSnapshot& teacher, const ObservationAdapter& adapter,
                       nn::MlpNet& student, const nn::Matrix& observations,
                       LossKind kind = LossKind::mse, double temperature = 1.0);

}  // namespace distil::reuse
