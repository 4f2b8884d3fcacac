#include "arld/replay/n_step.hpp"

#include "arld/error.hpp"

namespace arld::replay {

NStepAccumulator::NStepAccumulator(std::size_t n, double gamma) : n_(n), gamma_(gamma) {
  require(n >= 1, "n-step: N must be at least 1");
}

Transition NStepAccumulator::complete(std::size_t index) const {
  Transition t = window_[index];
  NStepInfo info;
  double discount = 1.0;
  std::size_t k = index;
  for (; k < window_.size() && info.length < n_; ++k) {
    info.discounted_return += discount * window_[k].reward;
    discount *= gamma_;
    ++info.length;
    if (window_[k].terminal) {
      info.terminal = true;
      break;
    }
  }
  const std::size_t last = index + info.length - 1;
  info.state = window_[last].next_state;
  t.n_step = std::move(info);
  return t;
}

std::vector<Transition> NStepAccumulator::push(Transition t) {
  window_.push_back(std::move(t));
  std::vector<Transition> ready;
  if (window_.size() >= n_) {
    ready.push_back(complete(0));
    window_.pop_front();
  }
  return ready;
}

std::vector<Transition> NStepAccumulator::flush() {
  std::vector<Transition> ready;
  for (std::size_t i = 0; i < window_.size(); ++i) ready.push_back(complete(i));
  window_.clear();
  return ready;
}

}  // namespace arld::replay
