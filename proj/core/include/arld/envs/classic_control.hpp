#pragma once

#include <array>

#include "arld/envs/environment.hpp"

namespace arld::envs {

class CartPole final : public Environment {
 public:
  struct State {
    double x = 0, x_dot = 0, theta = 0, theta_dot = 0;
  };

  CartPole() : Environment(Task::cart_pole) {}

  std::vector<double> observation() const override;
  RenderState render_state() const override;
  const State& state() const noexcept { return s_; }
  /// Places the system at an exact state and starts a fresh episode there.
  void set_state(const State& s);

 protected:
  void sample_initial_state(Rng& rng) override;
  std::pair<double, bool> advance(std::size_t action) override;

 private:
  State s_;
};

class Acrobot final : public Environment {
 public:
  /// theta1, theta2, dtheta1, dtheta2
  using State = std::array<double, 4>;

  Acrobot() : Environment(Task::acrobot) {}

  std::vector<double> observation() const override;
  RenderState render_state() const override;
  const State& state() const noexcept { return s_; }
  void set_state(const State& s);

  /// Time derivative of the augmented state (state, torque).
  static std::array<double, 5> dynamics(const std::array<double, 5>& augmented);

 protected:
  void sample_initial_state(Rng& rng) override;
  std::pair<double, bool> advance(std::size_t action) override;

 private:
  State s_{};
};

class MountainCar final : public Environment {
 public:
  struct State {
    double position = 0, velocity = 0;
  };

  MountainCar() : Environment(Task::mountain_car) {}

  std::vector<double> observation() const override;
  RenderState render_state() const override;
  const State& state() const noexcept { return s_; }
  void set_state(const State& s);

 protected:
  void sample_initial_state(Rng& rng) override;
  std::pair<double, bool> advance(std::size_t action) override;

 private:
  State s_;
};

}  // namespace arld::envs
