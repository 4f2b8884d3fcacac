#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

namespace arld::query {

/// AVL tree of (value, sequence) keys with subtree sizes, giving O(log n)
/// insert, erase and k-th smallest lookup. The sequence number makes equal
/// values distinct so a multiset can drop one specific instance.
class OrderStatisticTree {
 public:
  OrderStatisticTree();
  OrderStatisticTree(const OrderStatisticTree& other);
  OrderStatisticTree& operator=(const OrderStatisticTree& other);
  OrderStatisticTree(OrderStatisticTree&&) noexcept;
  OrderStatisticTree& operator=(OrderStatisticTree&&) noexcept;
  ~OrderStatisticTree();

  void insert(double value, std::uint64_t sequence);
  /// Returns false when the key is absent.
  bool erase(double value, std::uint64_t sequence);
  /// 0-based k-th smallest value.
  double kth_smallest(std::size_t k) const;

  std::size_t size() const noexcept;
  int height() const noexcept;
  std::vector<double> in_order() const;
  void clear() noexcept;

  /// Nodes touched by all operations so far (complexity instrumentation).
  std::uint64_t node_visits() const noexcept { return visits_; }

 private:
  struct Node;
  using NodePtr = std::unique_ptr<Node>;

  NodePtr insert(NodePtr node, double value, std::uint64_t sequence);
  NodePtr erase(NodePtr node, double value, std::uint64_t sequence, bool& removed);
  NodePtr erase_min(NodePtr node, NodePtr& min_out);
  static NodePtr rebalance(NodePtr node);
  static NodePtr rotate_left(NodePtr node);
  static NodePtr rotate_right(NodePtr node);
  static void update(Node& node) noexcept;
  static NodePtr clone(const Node* node);

  NodePtr root_;
  mutable std::uint64_t visits_ = 0;
};

}  // namespace arld::query
