#pragma once

#include <span>
#include <vector>

#include "distil/env/scenario.hpp"
#include "distil/env/world.hpp"
#include "distil/nn/matrix.hpp"

namespace distil::reuse {

/// Maps a student observation onto a teacher's input layout.
///
/// Segments are matched by name. Within a matched segment the first
/// min(count) records are copied (observations list entities nearest first,
/// so this keeps the nearest ones), each truncated to min(width). Every other
/// teacher slot is zero.
class ObservationAdapter {
 public:
  ObservationAdapter(env::ObservationLayout teacher, env::ObservationLayout student);

  /// ConfigError when the scenarios differ in kind or the agents in role.
  static ObservationAdapter between(const env::ScenarioSpec& source, std::size_t source_agent,
                                    const env::ScenarioSpec& target, std::size_t target_agent);

  std::vector<double> adapt(std::span<const double> student_observation) const;
  /// Column-wise adapt of a (student_size x B) batch.
  nn::Matrix adapt(const nn::Matrix& student_observations) const;

  std::size_t teacher_size() const { return teacher_size_; }
  std::size_t student_size() const { return student_size_; }
  bool identity() const { return identity_; }

 private:
  struct Copy {
    std::size_t from;
    std::size_t to;
    std::size_t length;
  };
  std::vector<Copy> copies_;
  std::size_t teacher_size_ = 0;
  std::size_t student_size_ = 0;
  bool identity_ = false;
};

}  // namespace distil::reuse
