#include "arld/envs/environment.hpp"

#include <numeric>
#include <stdexcept>
#include <string>
#include <tuple>

#include "arld/envs/classic_control.hpp"
#include "arld/error.hpp"

namespace arld::envs {

const EnvSpec& spec_for(Task task) {
  static const EnvSpec cart_pole{"cartpole", 4, 2, 200, 195.0};
  static const EnvSpec acrobot{"acrobot", 6, 3, 500, -100.0};
  static const EnvSpec mountain_car{"mountaincar", 2, 3, 200, -110.0};
  switch (task) {
    case Task::cart_pole: return cart_pole;
    case Task::acrobot: return acrobot;
    case Task::mountain_car: return mountain_car;
  }
  throw std::invalid_argument("unknown task");
}

std::string_view task_name(Task task) { return spec_for(task).name; }

Task parse_task(std::string_view name) {
  if (name == "cartpole") return Task::cart_pole;
  if (name == "acrobot") return Task::acrobot;
  if (name == "mountaincar") return Task::mountain_car;
  throw std::invalid_argument("unknown task '" + std::string(name) +
                              "' (expected cartpole, acrobot or mountaincar)");
}

std::vector<double> Environment::reset(std::uint64_t seed) {
  rng_.seed(seed);
  return reset();
}

std::vector<double> Environment::reset() {
  sample_initial_state(rng_);
  start_episode();
  return observation();
}

StepResult Environment::step(std::size_t action) {
  require(!over_, "step: episode is finished; call reset()");
  require(action < spec().num_actions, "step: action " + std::to_string(action) + " out of range");
  StepResult result;
  std::tie(result.reward, result.terminal) = advance(action);
  ++elapsed_;
  result.truncated = !result.terminal && elapsed_ >= spec().max_episode_steps;
  over_ = result.done();
  result.next_state = observation();
  return result;
}

std::unique_ptr<Environment> make_environment(Task task) {
  switch (task) {
    case Task::cart_pole: return std::make_unique<CartPole>();
    case Task::acrobot: return std::make_unique<Acrobot>();
    case Task::mountain_car: return std::make_unique<MountainCar>();
  }
  throw std::invalid_argument("unknown task");
}

double episode_return(std::span<const double> rewards) {
  return std::accumulate(rewards.begin(), rewards.end(), 0.0);
}

}  // namespace arld::envs
