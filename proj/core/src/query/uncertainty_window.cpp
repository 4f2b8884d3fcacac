#include "arld/query/uncertainty_window.hpp"

#include <algorithm>
#include <cmath>

#include "arld/error.hpp"

namespace arld::query {

// ---- OrderStatisticTree -------------------------------------------------

struct OrderStatisticTree::Node {
  double value;
  std::uint64_t sequence;
  int height = 1;
  std::size_t size = 1;
  NodePtr left;
  NodePtr right;
};

namespace {

bool key_less(double v1, std::uint64_t s1, double v2, std::uint64_t s2) {
  return v1 < v2 || (v1 == v2 && s1 < s2);
}

}  // namespace

OrderStatisticTree::OrderStatisticTree() = default;
OrderStatisticTree::OrderStatisticTree(OrderStatisticTree&&) noexcept = default;
OrderStatisticTree& OrderStatisticTree::operator=(OrderStatisticTree&&) noexcept = default;
OrderStatisticTree::~OrderStatisticTree() = default;
void OrderStatisticTree::clear() noexcept { root_.reset(); }

OrderStatisticTree::OrderStatisticTree(const OrderStatisticTree& other)
    : root_(clone(other.root_.get())), visits_(other.visits_) {}

OrderStatisticTree& OrderStatisticTree::operator=(const OrderStatisticTree& other) {
  if (this != &other) {
    root_ = clone(other.root_.get());
    visits_ = other.visits_;
  }
  return *this;
}

OrderStatisticTree::NodePtr OrderStatisticTree::clone(const Node* node) {
  if (!node) return nullptr;
  auto copy = std::make_unique<Node>(Node{node->value, node->sequence, node->height, node->size,
                                          nullptr, nullptr});
  copy->left = clone(node->left.get());
  copy->right = clone(node->right.get());
  return copy;
}

std::size_t OrderStatisticTree::size() const noexcept { return root_ ? root_->size : 0; }
int OrderStatisticTree::height() const noexcept { return root_ ? root_->height : 0; }

void OrderStatisticTree::update(Node& node) noexcept {
  const int hl = node.left ? node.left->height : 0;
  const int hr = node.right ? node.right->height : 0;
  node.height = 1 + std::max(hl, hr);
  node.size = 1 + (node.left ? node.left->size : 0) + (node.right ? node.right->size : 0);
}

OrderStatisticTree::NodePtr OrderStatisticTree::rotate_left(NodePtr node) {
  NodePtr pivot = std::move(node->right);
  node->right = std::move(pivot->left);
  update(*node);
  pivot->left = std::move(node);
  update(*pivot);
  return pivot;
}

OrderStatisticTree::NodePtr OrderStatisticTree::rotate_right(NodePtr node) {
  NodePtr pivot = std::move(node->left);
  node->left = std::move(pivot->right);
  update(*node);
  pivot->right = std::move(node);
  update(*pivot);
  return pivot;
}

OrderStatisticTree::NodePtr OrderStatisticTree::rebalance(NodePtr node) {
  update(*node);
  auto h = [](const NodePtr& n) { return n ? n->height : 0; };
  const int balance = h(node->left) - h(node->right);
  if (balance > 1) {
    if (h(node->left->left) < h(node->left->right)) node->left = rotate_left(std::move(node->left));
    return rotate_right(std::move(node));
  }
  if (balance < -1) {
    if (h(node->right->right) < h(node->right->left))
      node->right = rotate_right(std::move(node->right));
    return rotate_left(std::move(node));
  }
  return node;
}

OrderStatisticTree::NodePtr OrderStatisticTree::insert(NodePtr node, double value,
                                                       std::uint64_t sequence) {
  ++visits_;
  if (!node) return std::make_unique<Node>(Node{value, sequence, 1, 1, nullptr, nullptr});
  if (key_less(value, sequence, node->value, node->sequence))
    node->left = insert(std::move(node->left), value, sequence);
  else
    node->right = insert(std::move(node->right), value, sequence);
  return rebalance(std::move(node));
}

void OrderStatisticTree::insert(double value, std::uint64_t sequence) {
  root_ = insert(std::move(root_), value, sequence);
}

OrderStatisticTree::NodePtr OrderStatisticTree::erase_min(NodePtr node, NodePtr& min_out) {
  ++visits_;
  if (!node->left) {
    NodePtr right = std::move(node->right);
    min_out = std::move(node);
    return right;
  }
  node->left = erase_min(std::move(node->left), min_out);
  return rebalance(std::move(node));
}

OrderStatisticTree::NodePtr OrderStatisticTree::erase(NodePtr node, double value,
                                                      std::uint64_t sequence, bool& removed) {
  ++visits_;
  if (!node) return nullptr;
  if (key_less(value, sequence, node->value, node->sequence)) {
    node->left = erase(std::move(node->left), value, sequence, removed);
  } else if (key_less(node->value, node->sequence, value, sequence)) {
    node->right = erase(std::move(node->right), value, sequence, removed);
  } else {
    removed = true;
    if (!node->left) return std::move(node->right);
    if (!node->right) return std::move(node->left);
    NodePtr successor;
    NodePtr right = erase_min(std::move(node->right), successor);
    successor->left = std::move(node->left);
    successor->right = std::move(right);
    node = std::move(successor);
  }
  return rebalance(std::move(node));
}

bool OrderStatisticTree::erase(double value, std::uint64_t sequence) {
  bool removed = false;
  root_ = erase(std::move(root_), value, sequence, removed);
  return removed;
}

double OrderStatisticTree::kth_smallest(std::size_t k) const {
  require(k < size(), "order statistic: rank out of range");
  const Node* node = root_.get();
  while (true) {
    ++visits_;
    const std::size_t left = node->left ? node->left->size : 0;
    if (k < left) {
      node = node->left.get();
    } else if (k == left) {
      return node->value;
    } else {
      k -= left + 1;
      node = node->right.get();
    }
  }
}

std::vector<double> OrderStatisticTree::in_order() const {
  std::vector<double> out;
  out.reserve(size());
  std::vector<const Node*> stack;
  const Node* node = root_.get();
  while (node || !stack.empty()) {
    while (node) {
      stack.push_back(node);
      node = node->left.get();
    }
    node = stack.back();
    stack.pop_back();
    out.push_back(node->value);
    node = node->right.get();
  }
  return out;
}

// ---- UncertaintyWindow --------------------------------------------------

UncertaintyWindow::UncertaintyWindow(std::size_t capacity) : capacity_(capacity) {
  require(capacity >= 1, "uncertainty window: capacity must be at least 1");
}

void UncertaintyWindow::insert(double value) {
  require(std::isfinite(value), "uncertainty window: non-finite value");
  if (fifo_.size() >= capacity_) evict_oldest();
  const Entry entry{value, next_sequence_++};
  fifo_.push_back(entry);
  index_.insert(entry.value, entry.sequence);
}

void UncertaintyWindow::evict_oldest() {
  require(!fifo_.empty(), "uncertainty window: evict from empty window");
  const Entry oldest = fifo_.front();
  fifo_.pop_front();
  const bool removed = index_.erase(oldest.value, oldest.sequence);
  require(removed, "uncertainty window: ordered index out of sync");
}

double UncertaintyWindow::descending_rank(std::size_t rank) const {
  require(rank < size(), "uncertainty window: rank out of range");
  return index_.kth_smallest(size() - 1 - rank);
}

std::vector<double> UncertaintyWindow::fifo_values() const {
  std::vector<double> out;
  out.reserve(fifo_.size());
  for (const auto& e : fifo_) out.push_back(e.value);
  return out;
}

std::vector<double> UncertaintyWindow::sorted_values() const { return index_.in_order(); }

std::size_t threshold_rank(std::size_t n, double t_query) {
  require(n >= 1, "threshold_rank: empty window");
  require(t_query >= 0.0 && t_query <= 1.0, "threshold_rank: t_query must lie in [0, 1]");
  const auto rank = static_cast<std::size_t>(std::floor(static_cast<double>(n) * t_query));
  return std::min(rank, n - 1);
}

QueryDecision should_query(UncertaintyWindow& window, double uncertainty, double t_query) {
  require(std::isfinite(uncertainty), "should_query: non-finite uncertainty");
  require(t_query >= 0.0 && t_query <= 1.0, "should_query: t_query must lie in [0, 1]");
  QueryDecision decision;
  if (window.empty()) {
    decision.query = true;
  } else {
    decision.threshold = window.descending_rank(threshold_rank(window.size(), t_query));
    decision.query = uncertainty > *decision.threshold;
  }
  window.insert(uncertainty);
  return decision;
}

}  // namespace arld::query
