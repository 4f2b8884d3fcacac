#pragma once

#include <cstddef>
#include <deque>
#include <iosfwd>
#include <span>
#include <vector>

#include "arld/random.hpp"
#include "arld/replay/segment_tree.hpp"
#include "arld/replay/transition.hpp"

namespace arld::replay {

struct ReplayOptions {
  std::size_t capacity = 10000;
  double alpha = 0.6;        // priority exponent
  double eps_agent = 1e-3;   // base priority added to |td|
  double eps_demo = 1.0;     // extra priority of demonstration entries

  friend bool operator==(const ReplayOptions&, const ReplayOptions&) = default;
};

struct SampledEntry {
  std::size_t id = 0;
  double weight = 1.0;  // importance weight normalised by the buffer-wide maximum
};

/// Proportional prioritized replay. Demonstration entries are never evicted;
/// when full, the oldest agent-generated entry is overwritten.
class PrioritizedBuffer {
 public:
  explicit PrioritizedBuffer(ReplayOptions options);

  const ReplayOptions& options() const noexcept { return options_; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t capacity() const noexcept { return options_.capacity; }
  std::size_t demo_count() const noexcept { return demo_count_; }
  bool empty() const noexcept { return entries_.empty(); }

  /// Inserts at the current maximum priority (1 for an empty buffer).
  /// Throws std::length_error if the buffer is full of demonstrations.
  std::size_t push(Transition t);

  std::vector<SampledEntry> sample(std::size_t batch_size, double beta, Rng& rng) const;

  /// p_i = |td_i| + eps_agent (+ eps_demo for demonstrations).
  void update_priorities(std::span<const std::size_t> ids, std::span<const double> td_errors);

  const Transition& at(std::size_t id) const;
  double priority(std::size_t id) const;
  /// Sum of p_i^alpha at the tree root.
  double total_priority() const noexcept { return sum_.root(); }
  double max_priority() const noexcept { return max_priority_; }
  bool tree_consistent() const;

  void save(std::ostream& out) const;
  static PrioritizedBuffer load(std::istream& in);

 private:
  void set_priority(std::size_t id, double priority);

  ReplayOptions options_;
  std::vector<Transition> entries_;
  std::vector<double> priorities_;
  std::deque<std::size_t> agent_fifo_;  // agent-entry slots, oldest first
  SumTree sum_;
  MinTree min_;
  MaxTree max_;
  double max_priority_ = 1.0;
  std::size_t demo_count_ = 0;
};

/// Per-head Bernoulli(p) bootstrap mask; an all-zero draw is redrawn.
std::vector<std::uint8_t> draw_mask(Rng& rng, std::size_t heads, double p);

}  // namespace arld::replay
