#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "arld/agent/config.hpp"
#include "arld/nn/layers.hpp"
#include "arld/nn/network.hpp"
#include "arld/replay/transition.hpp"

namespace arld::agent {

std::size_t argmax(std::span<const double> values);

/// Double Q-learning target: r if terminal, else
/// r + gamma * Q_target(s', argmax_a Q_online(s', a)).
double td_target(double reward, bool terminal, double gamma,
                 std::span<const double> online_next_q, std::span<const double> target_next_q);

/// sum_i gamma^i r_i over the window, plus gamma^len * bootstrap when the
/// episode did not end inside the window.
double n_step_target(std::span<const double> rewards, double gamma,
                     std::optional<double> bootstrap_value);

/// max_a [Q(s,a) + M * 1(a != a_E)] - Q(s, a_E).
double margin_loss(std::span<const double> q_values, std::size_t expert_action, double margin);

/// d margin_loss / dQ (one +1 and one -1 entry, or all zero when satisfied
/// by the expert action itself).
std::vector<double> margin_loss_gradient(std::span<const double> q_values,
                                         std::size_t expert_action, double margin);

struct WeightedTransition {
  const replay::Transition* transition = nullptr;
  double weight = 1.0;  // importance-sampling weight
};

/// Noise draws used by one update of a noisy network.
struct UpdateNoise {
  nn::NoiseSample online;       // Q(s, a)
  nn::NoiseSample online_next;  // argmax at s'
  nn::NoiseSample target_next;  // Q_target(s', a*)
};

struct LossBreakdown {
  double total = 0.0;
  double td = 0.0;
  double n_step = 0.0;
  double margin = 0.0;
  double l2 = 0.0;
  std::vector<double> td_errors;  // |delta| per entry, averaged over privy heads
};

/// L = L_TD + lambda1 L_N + lambda2 L_E + lambda3 ||theta||^2 on a batch.
/// Squared TD terms carry importance weights; the margin term applies to
/// demonstrations only and is unweighted. Each head k trains on entries whose
/// mask bit is set; reported terms are means over heads. When `grads` is
/// given, head gradients are those of their own loss and the trunk receives
/// the 1/K-normalised sum.
LossBreakdown composite_loss(std::span<const WeightedTransition> batch, const nn::QNetwork& online,
                             const nn::QNetwork& target, const AgentConfig& cfg,
                             const UpdateNoise* noise, nn::QNetwork* grads);

}  // namespace arld::agent
