#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "usvnav/core/random.hpp"
#include "usvnav/nn/model.hpp"

namespace usvnav::rl {

template <class S>
struct TransitionBatch {
  nn::Batch<S> observations;
  nn::Batch<S> next_observations;
  std::vector<int> actions;
  std::vector<S> rewards;
  std::vector<S> terminal;  // 1 drops the bootstrap term

  int size() const { return static_cast<int>(actions.size()); }
};

/// FIFO ring buffer of transitions over encoded observations of fixed width.
/// Storage grows on demand up to `capacity`.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, int observation_width) : capacity_(capacity), width_(observation_width) {
    if (capacity == 0 || observation_width <= 0) throw std::invalid_argument("replay buffer needs positive capacity and width");
  }

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  int width() const { return width_; }

  void push(std::span<const float> obs, int action, float reward, std::span<const float> next_obs, bool terminal) {
    if (static_cast<int>(obs.size()) != width_ || static_cast<int>(next_obs.size()) != width_) {
      throw std::invalid_argument("observation width mismatch");
    }
    const std::size_t slot = head_;
    if (slot == actions_.size()) {
      obs_.insert(obs_.end(), obs.begin(), obs.end());
      next_.insert(next_.end(), next_obs.begin(), next_obs.end());
      actions_.push_back(action);
      rewards_.push_back(reward);
      terminal_.push_back(terminal ? 1.0f : 0.0f);
    } else {
      std::copy(obs.begin(), obs.end(), obs_.begin() + static_cast<std::ptrdiff_t>(slot * width_));
      std::copy(next_obs.begin(), next_obs.end(), next_.begin() + static_cast<std::ptrdiff_t>(slot * width_));
      actions_[slot] = action;
      rewards_[slot] = reward;
      terminal_[slot] = terminal ? 1.0f : 0.0f;
    }
    head_ = (head_ + 1) % capacity_;
    size_ = std::min(size_ + 1, capacity_);
  }

  /// Stored action of the item `age` inserts ago (0 = newest).
  int action_at_age(std::size_t age) const {
    if (age >= size_) throw std::out_of_range("replay age out of range");
    return actions_[(head_ + capacity_ - 1 - age) % capacity_];
  }

  /// Uniform sampling with replacement.
  template <class S = float>
  TransitionBatch<S> sample(Rng& rng, int batch_size) const {
    if (size_ == 0) throw std::logic_error("sampling from an empty replay buffer");
    std::vector<float> obs(static_cast<std::size_t>(batch_size * width_)), next(obs.size());
    TransitionBatch<S> b;
    for (int i = 0; i < batch_size; ++i) {
      const std::size_t idx = rng.below(size_);
      std::copy_n(obs_.begin() + static_cast<std::ptrdiff_t>(idx * width_), width_, obs.begin() + i * width_);
      std::copy_n(next_.begin() + static_cast<std::ptrdiff_t>(idx * width_), width_, next.begin() + i * width_);
      b.actions.push_back(actions_[idx]);
      b.rewards.push_back(static_cast<S>(rewards_[idx]));
      b.terminal.push_back(static_cast<S>(terminal_[idx]));
    }
    const int beams = width_ - 4;
    b.observations = nn::Batch<S>::from_rows(obs, batch_size, beams);
    b.next_observations = nn::Batch<S>::from_rows(next, batch_size, beams);
    return b;
  }

 private:
  std::size_t capacity_;
  int width_;
  std::size_t head_ = 0;
  std::size_t size_ = 0;
  std::vector<float> obs_, next_;
  std::vector<int> actions_;
  std::vector<float> rewards_, terminal_;
};

}  // namespace usvnav::rl
