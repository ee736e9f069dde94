#include "distil/reuse/reuse_loss.hpp"

#include "distil/errors.hpp"

namespace distil::reuse {

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::mse: return "mse";
    case LossKind::kd_kl: return "kd_kl";
    case LossKind::ce: return "ce";
  }
  return "?";
}

LossKind loss_kind_from_string(const std::string& name) {
  if (name == "mse") return LossKind::mse;
  if (name == "kd_kl") return LossKind::kd_kl;
  if (name == "ce") return LossKind::ce;
  throw ConfigError("unknown reuse loss '" + name + "' (expected mse, kd_kl or ce)");
}

nn::LossResult reuse_loss_from_logits(const nn::Matrix& student_logits,
                                      const nn::Matrix& teacher_logits, LossKind kind,
                                      double temperature) {
  nn::require_same_shape(student_logits, teacher_logits, "reuse_loss");
  if (student_logits.cols() == 0) throw ArgumentError("reuse_loss: empty batch");
  switch (kind) {
    case LossKind::mse: {
      // Batch mean of the per-sample squared error mean over the logits.
      return nn::mse_loss(student_logits, teacher_logits);
    }
    case LossKind::kd_kl: return nn::kd_loss(student_logits, teacher_logits, temperature);
    case LossKind::ce: return nn::ce_loss(student_logits, teacher_logits, temperature);
  }
  throw ConfigError("invalid reuse loss kind");
}

ReuseResult reuse_loss(const TeacherSnapshot& teacher, const ObservationAdapter& adapter,
                       nn::MlpNet& student, const nn::Matrix& observations, LossKind kind,
                       double temperature) {
  if (adapter.teacher_size() != teacher.input_size()) {
    throw ConfigError("reuse_loss: adapter does not target this teacher");
  }
  const nn::Matrix teacher_logits = teacher.actor().evaluate(adapter.adapt(observations));
  ReuseResult out;
  out.student_logits = student.forward(observations);
  nn::LossResult l = reuse_loss_from_logits(out.student_logits, teacher_logits, kind, temperature);
  out.value = l.value;
  out.logit_grad = std::move(l.grad);
  return out;
}

}  // namespace distil::reuse
