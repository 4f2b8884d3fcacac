#include <cmath>

#include "arld/envs/classic_control.hpp"
#include "arld/envs/constants.hpp"

namespace arld::envs {

namespace c = constants::cart_pole;

std::vector<double> CartPole::observation() const {
  return {s_.x, s_.x_dot, s_.theta, s_.theta_dot};
}

RenderState CartPole::render_state() const {
  return {{"cart_position", s_.x},
          {"cart_velocity", s_.x_dot},
          {"pole_angle", s_.theta},
          {"pole_angular_velocity", s_.theta_dot}};
}

void CartPole::set_state(const State& s) {
  s_ = s;
  start_episode();
}

void CartPole::sample_initial_state(Rng& rng) {
  std::uniform_real_distribution<double> dist(-c::init_bound, c::init_bound);
  s_.x = dist(rng);
  s_.x_dot = dist(rng);
  s_.theta = dist(rng);
  s_.theta_dot = dist(rng);
}

std::pair<double, bool> CartPole::advance(std::size_t action) {
  const double force = action == 1 ? c::force_mag : -c::force_mag;
  const double cos_theta = std::cos(s_.theta);
  const double sin_theta = std::sin(s_.theta);
  const double temp =
      (force + c::pole_mass_length * s_.theta_dot * s_.theta_dot * sin_theta) / c::total_mass;
  const double theta_acc =
      (c::gravity * sin_theta - cos_theta * temp) /
      (c::half_length * (4.0 / 3.0 - c::mass_pole * cos_theta * cos_theta / c::total_mass));
  const double x_acc = temp - c::pole_mass_length * theta_acc * cos_theta / c::total_mass;

  s_.x += c::tau * s_.x_dot;
  s_.x_dot += c::tau * x_acc;
  s_.theta += c::tau * s_.theta_dot;
  s_.theta_dot += c::tau * theta_acc;

  const bool failed = s_.x < -c::x_threshold || s_.x > c::x_threshold ||
                      s_.theta < -c::theta_threshold || s_.theta > c::theta_threshold;
  return {1.0, failed};
}

}  // namespace arld::envs
