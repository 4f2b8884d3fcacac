#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "arld/query/order_statistic_tree.hpp"

namespace arld::query {

/// The last N_r uncertainty values, kept both in arrival order (deque) and
/// in an order-statistic tree for rank lookups.
class UncertaintyWindow {
 public:
  explicit UncertaintyWindow(std::size_t capacity);

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t size() const noexcept { return fifo_.size(); }
  bool empty() const noexcept { return fifo_.empty(); }

  /// Evicts the oldest value when full, then appends `value`.
  void insert(double value);
  /// Drops the oldest value; ContractViolation when empty.
  void evict_oldest();

  /// rank 0 is the largest value in the window.
  double descending_rank(std::size_t rank) const;

  std::vector<double> fifo_values() const;
  std::vector<double> sorted_values() const;  // ascending
  const OrderStatisticTree& index() const noexcept { return index_; }

 private:
  struct Entry {
    double value;
    std::uint64_t sequence;
  };
  std::size_t capacity_;
  std::deque<Entry> fifo_;
  OrderStatisticTree index_;
  std::uint64_t next_sequence_ = 0;
};

/// Rank (descending) of the threshold among n recent values:
/// floor(n * t_query), clamped to the smallest element when t_query = 1.
std::size_t threshold_rank(std::size_t n, double t_query);

struct QueryDecision {
  bool query = false;
  std::optional<double> threshold;  // absent for an empty window
};

/// Adaptive query rule over recent uncertainties. Queries iff `uncertainty`
/// strictly exceeds the threshold-rank value of the window (always for an
/// empty window), then records `uncertainty` in the window.
QueryDecision should_query(UncertaintyWindow& window, double uncertainty, double t_query);

}  // namespace arld::query
