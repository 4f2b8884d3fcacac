#pragma once

// Small shared fixtures for harness-level tests.

#include <memory>

#include "arld/expert/expert.hpp"
#include "arld/harness/config.hpp"
#include "arld/nn/network.hpp"

namespace arld::testing {

/// Cart-pole controller as a network: Q(right) = relu(z), Q(left) = relu(-z)
/// with z = theta + 0.3 theta_dot. Balances for the full episode.
inline std::shared_ptr<const nn::QNetwork> balancing_network() {
  auto net = std::make_shared<nn::QNetwork>(
      nn::NetworkSpec{4, {2}, 2, nn::OutputKind::bootstrapped, 1});
  auto& w = net->trunk()[0].weights;
  w(0, 2) = 1.0;
  w(0, 3) = 0.3;
  w(1, 2) = -1.0;
  w(1, 3) = -0.3;
  auto& h = net->heads()[0].weights;
  h(0, 1) = 1.0;
  h(1, 0) = 1.0;
  return net;
}

/// A quick Cart-Pole configuration for exercising the trial loop.
inline harness::ExperimentConfig tiny_config(harness::Method method,
                                             nn::OutputKind variant = nn::OutputKind::bootstrapped) {
  auto c = harness::preset(envs::Task::cart_pole, method, variant);
  c.training_steps = 400;
  c.eval_period = 200;
  c.eval_episodes = 2;
  c.pretrain_steps = 30;
  c.agent.hidden = {16};
  c.agent.heads = 3;
  c.agent.batch_size = 8;
  c.replay.capacity = 1000;
  if (c.demo_count > 0) c.demo_count = 40;
  if (c.budget > 0) c.budget = 21;
  return c;
}

}  // namespace arld::testing
