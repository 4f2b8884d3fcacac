#include <algorithm>
#include <cmath>
#include <numbers>

#include "arld/envs/classic_control.hpp"
#include "arld/envs/constants.hpp"

namespace arld::envs {

namespace c = constants::acrobot;

namespace {

double wrap(double x, double lo, double hi) {
  const double span = hi - lo;
  while (x > hi) x -= span;
  while (x < lo) x += span;
  return x;
}

// One classical fourth-order Runge-Kutta step over [0, dt] (gym's rk4 with a
// two-point time grid).
std::array<double, 5> rk4(const std::array<double, 5>& y0, double dt) {
  auto axpy = [](const std::array<double, 5>& y, double h, const std::array<double, 5>& k) {
    std::array<double, 5> out{};
    for (std::size_t i = 0; i < 5; ++i) out[i] = y[i] + h * k[i];
    return out;
  };
  const auto k1 = Acrobot::dynamics(y0);
  const auto k2 = Acrobot::dynamics(axpy(y0, dt / 2.0, k1));
  const auto k3 = Acrobot::dynamics(axpy(y0, dt / 2.0, k2));
  const auto k4 = Acrobot::dynamics(axpy(y0, dt, k3));
  std::array<double, 5> y{};
  for (std::size_t i = 0; i < 5; ++i) y[i] = y0[i] + dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  return y;
}

}  // namespace

std::vector<double> Acrobot::observation() const {
  return {std::cos(s_[0]), std::sin(s_[0]), std::cos(s_[1]), std::sin(s_[1]), s_[2], s_[3]};
}

RenderState Acrobot::render_state() const {
  return {{"theta1", s_[0]}, {"theta2", s_[1]}, {"dtheta1", s_[2]}, {"dtheta2", s_[3]}};
}

void Acrobot::set_state(const State& s) {
  s_ = s;
  start_episode();
}

void Acrobot::sample_initial_state(Rng& rng) {
  std::uniform_real_distribution<double> dist(-c::init_bound, c::init_bound);
  for (double& v : s_) v = dist(rng);
}

std::array<double, 5> Acrobot::dynamics(const std::array<double, 5>& augmented) {
  constexpr double m1 = c::link_mass_1, m2 = c::link_mass_2, l1 = c::link_length_1;
  constexpr double lc1 = c::link_com_pos_1, lc2 = c::link_com_pos_2;
  constexpr double i1 = c::link_moi, i2 = c::link_moi, g = c::gravity;
  constexpr double half_pi = std::numbers::pi / 2.0;
  const double a = augmented[4];
  const double theta1 = augmented[0], theta2 = augmented[1];
  const double dtheta1 = augmented[2], dtheta2 = augmented[3];

  const double d1 =
      m1 * lc1 * lc1 + m2 * (l1 * l1 + lc2 * lc2 + 2 * l1 * lc2 * std::cos(theta2)) + i1 + i2;
  const double d2 = m2 * (lc2 * lc2 + l1 * lc2 * std::cos(theta2)) + i2;
  const double phi2 = m2 * lc2 * g * std::cos(theta1 + theta2 - half_pi);
  const double phi1 = -m2 * l1 * lc2 * dtheta2 * dtheta2 * std::sin(theta2) -
                      2 * m2 * l1 * lc2 * dtheta2 * dtheta1 * std::sin(theta2) +
                      (m1 * lc1 + m2 * l1) * g * std::cos(theta1 - half_pi) + phi2;
  // "book" variant of the equations of motion
  const double ddtheta2 =
      (a + d2 / d1 * phi1 - m2 * l1 * lc2 * dtheta1 * dtheta1 * std::sin(theta2) - phi2) /
      (m2 * lc2 * lc2 + i2 - d2 * d2 / d1);
  const double ddtheta1 = -(d2 * ddtheta2 + phi1) / d1;
  return {dtheta1, dtheta2, ddtheta1, ddtheta2, 0.0};
}

std::pair<double, bool> Acrobot::advance(std::size_t action) {
  const std::array<double, 5> augmented{s_[0], s_[1], s_[2], s_[3], c::available_torque[action]};
  const auto next = rk4(augmented, c::dt);
  s_[0] = wrap(next[0], -std::numbers::pi, std::numbers::pi);
  s_[1] = wrap(next[1], -std::numbers::pi, std::numbers::pi);
  s_[2] = std::clamp(next[2], -c::max_vel_1, c::max_vel_1);
  s_[3] = std::clamp(next[3], -c::max_vel_2, c::max_vel_2);
  const bool goal = -std::cos(s_[0]) - std::cos(s_[1] + s_[0]) > 1.0;
  return {goal ? 0.0 : -1.0, goal};
}

}  // namespace arld::envs
