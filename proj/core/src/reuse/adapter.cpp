#include "distil/reuse/adapter.hpp"

#include <algorithm>

#include "distil/errors.hpp"

namespace distil::reuse {

ObservationAdapter::ObservationAdapter(env::ObservationLayout teacher,
                                       env::ObservationLayout student)
    : teacher_size_(teacher.size()),
      student_size_(student.size()),
      identity_(teacher == student) {
  for (std::size_t t = 0; t < teacher.segments.size(); ++t) {
    const auto& ts = teacher.segments[t];
    const std::ptrdiff_t found = student.find(ts.name);
    if (found < 0) continue;
    const auto s = static_cast<std::size_t>(found);
    const auto& ss = student.segments[s];
    const std::size_t records = std::min(ts.count, ss.count);
    const std::size_t width = std::min(ts.width, ss.width);
    if (width == 0) continue;
    for (std::size_t r = 0; r < records; ++r) {
      copies_.push_back({student.offset(s) + r * ss.width, teacher.offset(t) + r * ts.width, width});
    }
  }
}

ObservationAdapter ObservationAdapter::between(const env::ScenarioSpec& source,
                                               std::size_t source_agent,
                                               const env::ScenarioSpec& target,
                                               std::size_t target_agent) {
  if (source.kind != target.kind) {
    throw ConfigError("no observation adapter from " + source.describe() + " to " +
                      target.describe());
  }
  const auto source_roles = source.roles();
  const auto target_roles = target.roles();
  if (source_agent >= source_roles.size() || target_agent >= target_roles.size()) {
    throw ArgumentError("observation adapter: agent index out of range");
  }
  if (source_roles[source_agent] != target_roles[target_agent]) {
    throw ConfigError("no observation adapter between roles " +
                      env::to_string(source_roles[source_agent]) + " and " +
                      env::to_string(target_roles[target_agent]));
  }
  return ObservationAdapter(env::observation_layout(source, source_agent),
                            env::observation_layout(target, target_agent));
}

std::vector<double> ObservationAdapter::adapt(std::span<const double> student_observation) const {
  if (student_observation.size() != student_size_) {
    throw DimensionError("observation adapter: expected " + std::to_string(student_size_) +
                         " values, got " + std::to_string(student_observation.size()));
  }
  std::vector<double> out(teacher_size_, 0.0);
  for (const Copy& c : copies_) {
    std::copy_n(student_observation.begin() + static_cast<std::ptrdiff_t>(c.from), c.length,
                out.begin() + static_cast<std::ptrdiff_t>(c.to));
  }
  return out;
}

nn::Matrix ObservationAdapter::adapt(const nn::Matrix& student_observations) const {
  if (identity_) {
    if (student_observations.rows() != student_size_) {
      throw DimensionError("observation adapter: wrong observation rows");
    }
    return student_observations;
  }
  if (student_observations.rows() != student_size_) {
    throw DimensionError("observation adapter: expected " + std::to_string(student_size_) +
                         " rows, got " + std::to_string(student_observations.rows()));
  }
  const std::size_t b = student_observations.cols();
  nn::Matrix out(teacher_size_, b);
  for (const Copy& c : copies_) {
    for (std::size_t k = 0; k < c.length; ++k) {
      for (std::size_t col = 0; col < b; ++col) {
        out(c.to + k, col) = student_observations(c.from + k, col);
      }
    }
  }
  return out;
}

}  // namespace distil::reuse
