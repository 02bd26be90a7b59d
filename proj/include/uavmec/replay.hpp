#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "uavmec/rng.hpp"

namespace uavmec {

// One stored experience: joint state/action, this agent's reward, next state.
struct Transition {
  std::vector<double> state;
  std::vector<double> action;
  double reward = 0.0;
  std::vector<double> next_state;
};

inline double is_weight(std::size_t batch_k, double prob, double mu) {
  if (prob <= 0.0) throw std::domain_error("is_weight: probability must be positive");
  return std::pow(static_cast<double>(batch_k) * prob, -mu);
}

// Proportional prioritized replay. Raw priorities |delta|+eps are stored as
// given; the beta exponent is applied once, inside the sum tree, so sampling
// probabilities are p_i^beta / sum_j p_j^beta. FIFO ring eviction.
class PriorityBuffer {
 public:
  PriorityBuffer(std::size_t capacity, double beta, double eps)
      : capacity_(capacity), beta_(beta), eps_(eps) {
    if (capacity == 0) throw std::invalid_argument("PriorityBuffer: zero capacity");
    leaf_base_ = 1;
    while (leaf_base_ < capacity) leaf_base_ <<= 1;
    tree_.assign(2 * leaf_base_, 0.0);
    slots_.resize(capacity);
    raw_priority_.assign(capacity, 0.0);
    ids_.assign(capacity, 0);
  }

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  double total_mass() const { return tree_[1]; }
  double max_raw_priority() const { return max_raw_; }
  std::size_t stale_updates_skipped() const { return stale_skipped_; }

  const Transition& at(std::size_t slot) const { return slots_[slot]; }
  double raw_priority_at(std::size_t slot) const { return raw_priority_[slot]; }

  // Insert with priority |delta|+eps when a TD error is supplied, otherwise
  // with the largest raw priority seen so far so fresh experience is sampled
  // promptly. Evicts the oldest entry when full.
  void push(Transition tr, std::optional<double> abs_delta = std::nullopt) {
    const double raw = abs_delta ? std::abs(*abs_delta) + eps_ : max_raw_;
    const std::size_t slot = next_slot_;
    next_slot_ = (next_slot_ + 1) % capacity_;
    if (size_ < capacity_) ++size_;
    slots_[slot] = std::move(tr);
    ids_[slot] = next_id_++;
    set_raw(slot, raw);
  }

  struct SampleSet {
    std::vector<std::size_t> slots;
    std::vector<std::uint64_t> ids;
    std::vector<double> probs;
  };

  // K independent proportional draws (with replacement).
  SampleSet sample(std::size_t k, Rng& rng) const {
    if (size_ < k) throw std::runtime_error("PriorityBuffer: fewer transitions than batch size");
    const double total = tree_[1];
    if (total <= 0.0) throw std::runtime_error("PriorityBuffer: empty priority mass");
    SampleSet out;
    out.slots.reserve(k);
    out.ids.reserve(k);
    out.probs.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
      const double u = rng.uniform(0.0, total);
      const std::size_t slot = descend(u);
      out.slots.push_back(slot);
      out.ids.push_back(ids_[slot]);
      out.probs.push_back(tree_[leaf_base_ + slot] / total);
    }
    return out;
  }

  // Re-priorize sampled transitions with their fresh |delta|. Entries whose
  // slot was recycled since sampling are skipped and counted.
  void update_priorities(std::span<const std::size_t> slots,
                         std::span<const std::uint64_t> sample_ids,
                         std::span<const double> abs_deltas) {
    if (slots.size() != abs_deltas.size() || slots.size() != sample_ids.size())
      throw std::invalid_argument("update_priorities: size mismatch");
    for (std::size_t i = 0; i < slots.size(); ++i) {
      const std::size_t slot = slots[i];
      if (slot >= capacity_) throw std::out_of_range("update_priorities: bad slot");
      if (ids_[slot] != sample_ids[i]) {
        ++stale_skipped_;
        continue;
      }
      set_raw(slot, std::abs(abs_deltas[i]) + eps_);
    }
  }

  // Direct probability of one slot under the current priorities.
  double probability(std::size_t slot) const {
    return tree_[leaf_base_ + slot] / tree_[1];
  }

 private:
  void set_raw(std::size_t slot, double raw) {
    if (!(raw > 0.0)) throw std::invalid_argument("priority must be positive");
    raw_priority_[slot] = raw;
    if (raw > max_raw_) max_raw_ = raw;
    std::size_t node = leaf_base_ + slot;
    tree_[node] = std::pow(raw, beta_);
    for (node >>= 1; node >= 1; node >>= 1) {
      tree_[node] = tree_[2 * node] + tree_[2 * node + 1];
      if (node == 1) break;
    }
  }

  std::size_t descend(double u) const {
    std::size_t node = 1;
    while (node < leaf_base_) {
      const double left = tree_[2 * node];
      if (u < left) {
        node = 2 * node;
      } else {
        u -= left;
        node = 2 * node + 1;
      }
    }
    std::size_t slot = node - leaf_base_;
    // Guard against u == total landing one past the last occupied leaf.
    if (slot >= size_) slot = size_ - 1;
    return slot;
  }

  std::size_t capacity_;
  double beta_;
  double eps_;
  std::size_t leaf_base_ = 1;
  std::vector<double> tree_;
  std::vector<Transition> slots_;
  std::vector<double> raw_priority_;
  std::vector<std::uint64_t> ids_;
  std::size_t size_ = 0;
  std::size_t next_slot_ = 0;
  std::uint64_t next_id_ = 1;
  double max_raw_ = 1.0;
  std::size_t stale_skipped_ = 0;
};

}  // namespace uavmec
