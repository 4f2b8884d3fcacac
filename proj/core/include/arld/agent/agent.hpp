#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "arld/agent/config.hpp"
#include "arld/agent/losses.hpp"
#include "arld/nn/adam.hpp"
#include "arld/nn/network.hpp"
#include "arld/random.hpp"
#include "arld/replay/prioritized_buffer.hpp"
#include "arld/uncertainty/uncertainty.hpp"

namespace arld::agent {

enum class ActMode { train, eval };

struct TrainDiagnostics {
  LossBreakdown loss;
  double epsilon = 0.0;
  double beta = 0.0;
  double mean_abs_td = 0.0;
  double max_abs_td = 0.0;
  bool target_synced = false;
};

/// Prioritized double-DQN learner with the demonstration-aware composite loss,
/// in a bootstrapped (K heads) or noisy-output variant.
class Agent {
 public:
  Agent(std::size_t obs_dim, std::size_t num_actions, AgentConfig config, std::uint64_t seed);

  const AgentConfig& config() const noexcept { return config_; }
  const nn::QNetwork& online() const noexcept { return online_; }
  const nn::QNetwork& target() const noexcept { return target_; }
  nn::QNetwork& mutable_online() noexcept { return online_; }
  std::size_t updates() const noexcept { return updates_; }
  std::size_t env_steps() const noexcept { return env_steps_; }
  std::size_t active_head() const noexcept { return active_head_; }
  double epsilon() const noexcept { return config_.epsilon.at(env_steps_); }
  Rng& rng() noexcept { return rng_; }

  /// Samples the behaviour head for the next episode (bootstrapped variant).
  void begin_episode();
  /// Advances the exploration clock by one environment step.
  void record_env_step() noexcept { ++env_steps_; }

  std::size_t act(std::span<const double> state, ActMode mode);
  /// Greedy Q-values used for evaluation and display: head mean, or noisy mean.
  std::vector<double> eval_q_values(std::span<const double> state) const;
  uncertainty::UncertaintyValue uncertainty(std::span<const double> state) const;
  std::vector<std::uint8_t> draw_mask();

  TrainDiagnostics train_step(replay::PrioritizedBuffer& buffer, double beta);
  TrainDiagnostics train_step(replay::PrioritizedBuffer& buffer);
  /// `steps` updates on a demonstration-only buffer.
  void pretrain(replay::PrioritizedBuffer& buffer, std::size_t steps);

  void save(std::ostream& out) const;
  static Agent load(std::istream& in, std::uint64_t seed);

 private:
  UpdateNoise draw_update_noise();
  void resample_behaviour_noise();

  AgentConfig config_;
  Rng rng_;
  nn::QNetwork online_;
  nn::QNetwork target_;
  nn::AdamState adam_;
  nn::QNetwork grads_;
  std::optional<nn::NoiseSample> behaviour_noise_;
  std::size_t active_head_ = 0;
  std::size_t updates_ = 0;
  std::size_t env_steps_ = 0;
};

nn::NetworkSpec network_spec(std::size_t obs_dim, std::size_t num_actions, const AgentConfig& cfg);

}  // namespace arld::agent
