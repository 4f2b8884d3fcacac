#include <algorithm>
#include <cmath>

#include "arld/envs/classic_control.hpp"
#include "arld/envs/constants.hpp"

namespace arld::envs {

namespace c = constants::mountain_car;

std::vector<double> MountainCar::observation() const { return {s_.position, s_.velocity}; }

RenderState MountainCar::render_state() const {
  return {{"position", s_.position},
          {"velocity", s_.velocity},
          {"height", std::sin(3.0 * s_.position)}};
}

void MountainCar::set_state(const State& s) {
  s_ = s;
  start_episode();
}

void MountainCar::sample_initial_state(Rng& rng) {
  s_.position = std::uniform_real_distribution<double>(c::init_low, c::init_high)(rng);
  s_.velocity = 0.0;
}

std::pair<double, bool> MountainCar::advance(std::size_t action) {
  s_.velocity += (static_cast<double>(action) - 1.0) * c::force +
                 std::cos(3.0 * s_.position) * (-c::gravity);
  s_.velocity = std::clamp(s_.velocity, -c::max_speed, c::max_speed);
  s_.position += s_.velocity;
  s_.position = std::clamp(s_.position, c::min_position, c::max_position);
  if (s_.position == c::min_position && s_.velocity < 0.0) s_.velocity = 0.0;
  const bool goal = s_.position >= c::goal_position && s_.velocity >= c::goal_velocity;
  return {-1.0, goal};
}

}  // namespace arld::envs
