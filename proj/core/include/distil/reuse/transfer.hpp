#pragma once

#include <vector>

#include "distil/reuse/adapter.hpp"
#include "distil/reuse/reuse_loss.hpp"
#include "distil/reuse/schedule.hpp"
#include "distil/reuse/teacher.hpp"

namespace distil::reuse {

/// Everything a trainer needs to blend teacher mimicking into actor updates.
struct TransferContext {
  std::vector<TeacherSnapshot> teachers;
  PairingPlan pairing;
  std::vector<ObservationAdapter> adapters;  // per student, to its paired teacher
  LossKind loss = LossKind::mse;
  double temperature = 1.0;
  AlphaSchedule schedule{0.5, 0.0, 0.02};
  std::vector<ReuseScaler> scalers;  // per student

  const TeacherSnapshot& teacher_of(std::size_t student) const {
    return teachers.at(pairing.teacher_of.at(student));
  }
};

/// Pairs students with teachers by role and builds the adapters. ConfigError
/// when a teacher's input does not match its declared source layout.
TransferContext make_transfer_context(std::vector<TeacherSnapshot> teachers,
                                      const env::ScenarioSpec& target, LossKind loss,
                                      double temperature, AlphaSchedule schedule,
                                      ScalerMode scaler_mode, double scale_k);

}  // namespace distil::reuse
