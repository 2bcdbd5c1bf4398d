#include "pricelab/replay_buffer.hpp"

#include <algorithm>

#include "pricelab/errors.hpp"

namespace pricelab {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw InvalidInput("replay capacity must be positive");
  storage_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(Transition transition) {
  if (storage_.size() < capacity_) {
    storage_.push_back(std::move(transition));
    return;
  }
  storage_[cursor_] = std::move(transition);
  cursor_ = (cursor_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= storage_.size()) throw InvalidInput("replay index out of range");
  if (storage_.size() < capacity_) return storage_[i];
  return storage_[(cursor_ + i) % capacity_];
}

std::optional<std::vector<const Transition*>> ReplayBuffer::sample(std::size_t batch,
                                                                   Rng& rng) const {
  if (batch == 0 || storage_.size() < batch) return std::nullopt;
  std::vector<const Transition*> out(batch);
  for (auto& slot : out) slot = &storage_[rng.uniform_index(storage_.size())];
  return out;
}

}  // namespace pricelab
