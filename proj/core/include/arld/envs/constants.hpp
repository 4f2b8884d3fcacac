#pragma once

// Dynamics constants of the classic-control tasks, copied from the public
// OpenAI Gym sources (gym/envs/classic_control/*.py, gym 0.26):
//   cartpole.py       CartPoleEnv (registered as CartPole-v0, 200-step limit)
//   acrobot.py        AcrobotEnv  (Acrobot-v1, 500-step limit, "book" dynamics)
//   mountain_car.py   MountainCarEnv (MountainCar-v0, 200-step limit)

#include <numbers>

namespace arld::envs::constants {

namespace cart_pole {
inline constexpr double gravity = 9.8;
inline constexpr double mass_cart = 1.0;
inline constexpr double mass_pole = 0.1;
inline constexpr double total_mass = mass_cart + mass_pole;
inline constexpr double half_length = 0.5;  // "length" in gym: half the pole length
inline constexpr double pole_mass_length = mass_pole * half_length;
inline constexpr double force_mag = 10.0;
inline constexpr double tau = 0.02;  // seconds between state updates, Euler
inline constexpr double theta_threshold = 12.0 * 2.0 * std::numbers::pi / 360.0;
inline constexpr double x_threshold = 2.4;
inline constexpr double init_bound = 0.05;
}  // namespace cart_pole

namespace acrobot {
inline constexpr double dt = 0.2;
inline constexpr double link_length_1 = 1.0;
inline constexpr double link_mass_1 = 1.0;
inline constexpr double link_mass_2 = 1.0;
inline constexpr double link_com_pos_1 = 0.5;
inline constexpr double link_com_pos_2 = 0.5;
inline constexpr double link_moi = 1.0;
inline constexpr double max_vel_1 = 4.0 * std::numbers::pi;
inline constexpr double max_vel_2 = 9.0 * std::numbers::pi;
inline constexpr double gravity = 9.8;
inline constexpr double available_torque[3] = {-1.0, 0.0, 1.0};
inline constexpr double init_bound = 0.1;
}  // namespace acrobot

namespace mountain_car {
inline constexpr double min_position = -1.2;
inline constexpr double max_position = 0.6;
inline constexpr double max_speed = 0.07;
inline constexpr double goal_position = 0.5;
inline constexpr double goal_velocity = 0.0;
inline constexpr double force = 0.001;
inline constexpr double gravity = 0.0025;
inline constexpr double init_low = -0.6;
inline constexpr double init_high = -0.4;
}  // namespace mountain_car

}  // namespace arld::envs::constants
