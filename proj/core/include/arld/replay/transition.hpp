#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace arld::replay {

/// Multi-step lookahead attached to a transition when the N-step loss is on.
struct NStepInfo {
  double discounted_return = 0.0;  // r_t + g r_{t+1} + ... + g^{len-1} r_{t+len-1}
  std::vector<double> state;       // s_{t+len}
  std::size_t length = 0;
  bool terminal = false;  // episode ended inside the window: no bootstrap term

  friend bool operator==(const NStepInfo&, const NStepInfo&) = default;
};

struct Transition {
  std::vector<double> state;
  std::size_t action = 0;  // the expert's action a_E when is_demo
  double reward = 0.0;
  std::vector<double> next_state;
  bool terminal = false;
  bool is_demo = false;
  std::vector<std::uint8_t> mask;  // 1 = head k trains on this transition
  std::optional<NStepInfo> n_step;

  friend bool operator==(const Transition&, const Transition&) = default;
};

}  // namespace arld::replay
