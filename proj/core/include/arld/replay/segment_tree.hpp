#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace arld::replay {

/// Complete binary tree over a power-of-two number of leaves where every
/// internal node holds op(left, right). Leaves beyond the used range hold
/// the identity element.
template <class Op>
class SegmentTree {
 public:
  SegmentTree() = default;
  SegmentTree(std::size_t capacity, double identity, Op op = {})
      : identity_(identity), op_(op) {
    leaves_ = 1;
    while (leaves_ < capacity) leaves_ *= 2;
    nodes_.assign(2 * leaves_, identity_);
  }

  std::size_t leaf_count() const noexcept { return leaves_; }
  double root() const noexcept { return nodes_[1]; }
  double get(std::size_t i) const noexcept { return nodes_[leaves_ + i]; }

  void set(std::size_t i, double value) {
    std::size_t node = leaves_ + i;
    nodes_[node] = value;
    for (node /= 2; node >= 1; node /= 2) nodes_[node] = op_(nodes_[2 * node], nodes_[2 * node + 1]);
  }

  /// Exhaustive check that every internal node equals op of its children.
  bool consistent() const {
    for (std::size_t node = 1; node < leaves_; ++node)
      if (nodes_[node] != op_(nodes_[2 * node], nodes_[2 * node + 1])) return false;
    return true;
  }

  /// For sum trees: smallest leaf index whose inclusive prefix sum exceeds `mass`.
  std::size_t find_prefix(double mass) const {
    std::size_t node = 1;
    while (node < leaves_) {
      if (mass < nodes_[2 * node]) {
        node = 2 * node;
      } else {
        mass -= nodes_[2 * node];
        node = 2 * node + 1;
      }
    }
    return node - leaves_;
  }

 private:
  std::size_t leaves_ = 0;
  double identity_ = 0.0;
  Op op_{};
  std::vector<double> nodes_;
};

struct MinOp {
  double operator()(double a, double b) const noexcept { return std::min(a, b); }
};
struct MaxOp {
  double operator()(double a, double b) const noexcept { return std::max(a, b); }
};

using SumTree = SegmentTree<std::plus<double>>;
using MinTree = SegmentTree<MinOp>;
using MaxTree = SegmentTree<MaxOp>;

inline SumTree make_sum_tree(std::size_t capacity) { return SumTree(capacity, 0.0); }
inline MinTree make_min_tree(std::size_t capacity) {
  return MinTree(capacity, std::numeric_limits<double>::infinity());
}
inline MaxTree make_max_tree(std::size_t capacity) { return MaxTree(capacity, 0.0); }

}  // namespace arld::replay
