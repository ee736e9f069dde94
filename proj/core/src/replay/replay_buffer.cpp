#include "distil/replay/replay_buffer.hpp"

#include <string>

#include "distil/errors.hpp"

namespace distil::replay {

ReplayBuffer::ReplayBuffer(TransitionDims dims, std::size_t capacity, std::uint64_t seed)
    : dims_(std::move(dims)), capacity_(capacity), rng_(make_rng(seed, 0x7e91a4ULL)) {
  if (capacity_ == 0) throw ArgumentError("ReplayBuffer: capacity must be positive");
  if (dims_.observation_sizes.empty()) throw ArgumentError("ReplayBuffer: no agents declared");
}

void ReplayBuffer::push(Transition t) {
  const std::size_t agents = dims_.observation_sizes.size();
  auto check = [&](bool ok, const char* what) {
    if (!ok) throw ArgumentError(std::string("ReplayBuffer::push: ") + what);
  };
  check(t.observations.size() == agents, "observation count");
  check(t.next_observations.size() == agents, "next observation count");
  check(t.actions.size() == agents, "action count");
  check(t.rewards.size() == agents, "reward count");
  for (std::size_t i = 0; i < agents; ++i) {
    check(t.observations[i].size() == dims_.observation_sizes[i], "observation size");
    check(t.next_observations[i].size() == dims_.observation_sizes[i], "next observation size");
    check(t.actions[i].size() == dims_.action_size, "action size");
  }
  if (storage_.size() < capacity_) {
    storage_.push_back(std::move(t));
  } else {
    storage_[cursor_] = std::move(t);
    cursor_ = (cursor_ + 1) % capacity_;
  }
}

const Transition& ReplayBuffer::at(std::size_t index) const {
  if (index >= storage_.size()) throw ArgumentError("ReplayBuffer::at: index out of range");
  // Once full, the oldest entry sits at the write cursor.
  return storage_[(cursor_ + index) % storage_.size()];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t n) {
  if (n == 0) throw ArgumentError("ReplayBuffer::sample: requested zero transitions");
  if (storage_.empty()) throw NotReadyError("ReplayBuffer::sample: buffer is empty");
  std::uniform_int_distribution<std::size_t> pick(0, storage_.size() - 1);
  std::vector<std::size_t> out(n);
  for (auto& i : out) i = pick(rng_);
  return out;
}

std::vector<Transition> ReplayBuffer::sample(std::size_t n) {
  std::vector<Transition> out;
  out.reserve(n);
  for (std::size_t i : sample_indices(n)) out.push_back(at(i));
  return out;
}

Batch make_batch(std::span<const Transition> transitions) {
  if (transitions.empty()) throw ArgumentError("make_batch: no transitions");
  const std::size_t batch = transitions.size();
  const std::size_t agents = transitions.front().observations.size();
  Batch b;
  b.done = nn::Matrix(1, batch);
  for (std::size_t i = 0; i < agents; ++i) {
    const std::size_t obs = transitions.front().observations[i].size();
    const std::size_t act = transitions.front().actions[i].size();
    b.observations.emplace_back(obs, batch);
    b.next_observations.emplace_back(obs, batch);
    b.actions.emplace_back(act, batch);
    b.rewards.emplace_back(1, batch);
  }
  for (std::size_t c = 0; c < batch; ++c) {
    const Transition& t = transitions[c];
    for (std::size_t i = 0; i < agents; ++i) {
      b.observations[i].set_column(c, t.observations[i]);
      b.next_observations[i].set_column(c, t.next_observations[i]);
      b.actions[i].set_column(c, t.actions[i]);
      b.rewards[i](0, c) = t.rewards[i];
    }
    b.done(0, c) = t.done ? 1.0 : 0.0;
  }
  return b;
}

}  // namespace distil::replay
