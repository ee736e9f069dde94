#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "distil/nn/matrix.hpp"
#include "distil/rng.hpp"

namespace distil::replay {

/// One joint environment step: every agent's observation, action logits and
/// reward, plus the shared terminal flag.
struct Transition {
  std::vector<std::vector<double>> observations;
  std::vector<std::vector<double>> actions;
  std::vector<double> rewards;
  std::vector<std::vector<double>> next_observations;
  bool done = false;

  friend bool operator==(const Transition&, const Transition&) = default;
};

struct TransitionDims {
  std::vector<std::size_t> observation_sizes;  // one per agent
  std::size_t action_size = 5;
};

inline constexpr std::size_t kDefaultCapacity = 1'000'000;

/// Fixed-capacity FIFO store of joint transitions with uniform sampling
/// (with replacement).
class ReplayBuffer {
 public:
  ReplayBuffer(TransitionDims dims, std::size_t capacity, std::uint64_t seed);

  /// Throws ArgumentError when the transition does not match the declared dims.
  void push(Transition transition);

  /// `n` uniform draws with replacement, so n may exceed size(). Throws
  /// NotReadyError on an empty buffer. Callers that want n distinct-ish
  /// transitions gate on ready(n).
  std::vector<Transition> sample(std::size_t n);
  /// Same draws as sample(), as logical indices (0 = oldest).
  std::vector<std::size_t> sample_indices(std::size_t n);

  /// Logical access, 0 = oldest retained transition.
  const Transition& at(std::size_t index) const;

  std::size_t size() const { return storage_.size(); }
  std::size_t capacity() const { return capacity_; }
  const TransitionDims& dims() const { return dims_; }
  bool ready(std::size_t n) const { return size() >= n && n > 0; }

 private:
  TransitionDims dims_;
  std::size_t capacity_;
  std::vector<Transition> storage_;
  std::size_t cursor_ = 0;  // next slot to overwrite once full
  Rng rng_;
};

/// Column-batched view of transitions for network updates: every matrix has
/// one column per transition.
struct Batch {
  std::vector<nn::Matrix> observations;       // per agent, (obs_size x B)
  std::vector<nn::Matrix> actions;            // per agent, (5 x B)
  std::vector<nn::Matrix> rewards;            // per agent, (1 x B)
  std::vector<nn::Matrix> next_observations;  // per agent, (obs_size x B)
  nn::Matrix done;                            // (1 x B), 1.0 for terminal
  std::size_t size() const { return done.cols(); }
};

Batch make_batch(std::span<const Transition> transitions);

}  // namespace distil::replay
