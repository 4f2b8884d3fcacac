#pragma once

#include <cstddef>
#include <vector>

#include "arld/nn/network.hpp"

namespace arld::agent {

/// Linear schedule from `start` to `end` over `anneal_steps`, constant after.
struct LinearSchedule {
  double start = 0.9;
  double end = 0.01;
  std::size_t anneal_steps = 1;

  double at(std::size_t step) const noexcept {
    if (anneal_steps == 0 || step >= anneal_steps) return end;
    const double frac = static_cast<double>(step) / static_cast<double>(anneal_steps);
    return start + frac * (end - start);
  }

  friend bool operator==(const LinearSchedule&, const LinearSchedule&) = default;
};

struct AgentConfig {
  double gamma = 0.99;
  double learning_rate = 1e-4;
  std::size_t batch_size = 32;
  std::size_t target_update_period = 1000;  // gradient updates between target syncs
  std::size_t learning_starts = 32;         // buffer size before the first update

  double lambda_n_step = 0.0;  // lambda1
  double lambda_margin = 1.0;  // lambda2
  double lambda_l2 = 0.0;      // lambda3
  double margin = 0.8;         // M
  std::size_t n_step = 10;     // N

  LinearSchedule epsilon{0.9, 0.01, 10000};
  LinearSchedule beta{0.4, 1.0, 20000};
  /// Apply epsilon-greedy on top of head/noise sampling.
  bool epsilon_with_sampling = true;

  nn::OutputKind variant = nn::OutputKind::bootstrapped;
  std::size_t heads = 10;
  std::vector<std::size_t> hidden{64, 64};
  double mask_probability = 1.0;

  friend bool operator==(const AgentConfig&, const AgentConfig&) = default;
};

}  // namespace arld::agent
