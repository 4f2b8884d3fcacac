#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "arld/random.hpp"

namespace arld::envs {

enum class Task { cart_pole, acrobot, mountain_car };

struct EnvSpec {
  std::string name;
  std::size_t obs_dim = 0;
  std::size_t num_actions = 0;
  std::size_t max_episode_steps = 0;
  double target_score = 0.0;
};

struct StepResult {
  std::vector<double> next_state;
  double reward = 0.0;
  bool terminal = false;   // task-defined end (failure or goal): no bootstrapping
  bool truncated = false;  // time limit hit without a terminal state
  bool done() const noexcept { return terminal || truncated; }
};

/// Named physical quantities for display (cart position, link angles, ...).
using RenderState = std::vector<std::pair<std::string, double>>;

const EnvSpec& spec_for(Task task);
std::string_view task_name(Task task);
Task parse_task(std::string_view name);

/// Episodic environment with a time limit. reset(seed) reseeds the initial
/// state generator; reset() continues the current stream.
class Environment {
 public:
  virtual ~Environment() = default;

  const EnvSpec& spec() const noexcept { return spec_for(task_); }
  Task task() const noexcept { return task_; }

  std::vector<double> reset(std::uint64_t seed);
  std::vector<double> reset();
  StepResult step(std::size_t action);

  bool episode_over() const noexcept { return over_; }
  std::size_t elapsed_steps() const noexcept { return elapsed_; }
  virtual std::vector<double> observation() const = 0;
  virtual RenderState render_state() const = 0;

 protected:
  explicit Environment(Task task) : task_(task), rng_(0) {}

  /// Marks a new episode as started without sampling (used by set_state).
  void start_episode() noexcept {
    elapsed_ = 0;
    over_ = false;
  }

  virtual void sample_initial_state(Rng& rng) = 0;
  /// Advances the physics; returns (reward, terminal).
  virtual std::pair<double, bool> advance(std::size_t action) = 0;

 private:
  Task task_;
  Rng rng_;
  std::size_t elapsed_ = 0;
  bool over_ = true;
};

std::unique_ptr<Environment> make_environment(Task task);

/// Undiscounted sum of rewards.
double episode_return(std::span<const double> rewards);

}  // namespace arld::envs
