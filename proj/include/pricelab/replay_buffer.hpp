#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "pricelab/rng.hpp"

namespace pricelab {

struct Transition {
  std::vector<double> obs;
  int action = 0;
  double reward = 0.0;
  std::vector<double> next_obs;

  bool operator==(const Transition&) const = default;
};

/// Fixed-capacity FIFO of transitions; sampling is uniform with replacement.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 1);

  void push(Transition transition);
  std::size_t size() const { return storage_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return storage_.empty(); }

  /// i-th element in insertion order, 0 = oldest retained.
  const Transition& at(std::size_t i) const;

  /// `batch` uniform draws, or nullopt while fewer than `batch` are stored.
  std::optional<std::vector<const Transition*>> sample(std::size_t batch, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::vector<Transition> storage_;
  std::size_t cursor_ = 0;  // next slot to overwrite once full
};

}  // namespace pricelab
