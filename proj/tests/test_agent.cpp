#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"

#include "arld/agent/agent.hpp"
#include "arld/agent/losses.hpp"
#include "arld/error.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace arld;
using namespace arld::agent;
using arld::testing::random_network;
using arld::testing::random_transition;
using arld::testing::uniform;

namespace {

// One input, one ReLU unit with weight 1, one head with weights (1.0, 0.5):
// Q([1]) = (1.0, 0.5).
nn::QNetwork fixture_network() {
  nn::QNetwork net(nn::NetworkSpec{1, {1}, 2, nn::OutputKind::bootstrapped, 1});
  net.trunk()[0].weights(0, 0) = 1.0;
  net.heads()[0].weights(0, 0) = 1.0;
  net.heads()[0].weights(1, 0) = 0.5;
  return net;
}

AgentConfig plain_config() {
  AgentConfig cfg;
  cfg.lambda_n_step = 0.0;
  cfg.lambda_margin = 0.0;
  cfg.lambda_l2 = 0.0;
  cfg.heads = 1;
  return cfg;
}

}  // namespace

TEST_CASE("double-Q target takes the online argmax and the target value") {
  const std::vector<double> online{0.1, 0.9, 0.3};
  const std::vector<double> target{5.0, 2.0, 7.0};
  CHECK(td_target(1.0, false, 0.5, online, target) == doctest::Approx(2.0));
  CHECK(td_target(1.0, true, 0.5, online, target) == 1.0);
}

TEST_CASE("n-step target") {
  const std::vector<double> r{1.0, 2.0, 3.0};
  CHECK(n_step_target(r, 0.5, std::nullopt) == doctest::Approx(1.0 + 1.0 + 0.75));
  CHECK(n_step_target(r, 0.5, 8.0) == doctest::Approx(2.75 + 0.125 * 8.0));
}

TEST_CASE("margin loss fixture and properties") {
  const std::vector<double> q{1.0, 0.5};
  CHECK(margin_loss(q, 0, 0.8) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(margin_loss(q, 1, 0.8) == doctest::Approx(1.0 + 0.8 - 0.5));
  const std::vector<double> satisfied{2.0, 0.5, 1.0};
  CHECK(margin_loss(satisfied, 0, 0.8) == 0.0);
  CHECK(margin_loss_gradient(satisfied, 0, 0.8) == std::vector<double>{0.0, 0.0, 0.0});
  const auto g = margin_loss_gradient(q, 0, 0.8);
  CHECK(g == std::vector<double>{-1.0, 1.0});
  CHECK_THROWS_AS(margin_loss(q, 2, 0.8), ContractViolation);

  Rng rng(3);
  for (int i = 0; i < 2000; ++i) {
    const auto v = arld::testing::random_vector(rng, 3, -2.0, 2.0);
    const std::size_t a = arld::testing::uniform_int(rng, 0, 2);
    const double m = uniform(rng, 0.0, 1.0);
    const double loss = margin_loss(v, a, m);
    CHECK(loss >= 0.0);
    bool satisfied_set = true;
    for (std::size_t b = 0; b < 3; ++b) {
      if (b != a && v[b] + m > v[a]) satisfied_set = false;
    }
    CHECK((loss == 0.0) == satisfied_set);
  }
}

TEST_CASE("composite loss fixtures") {
  const auto net = fixture_network();
  AgentConfig cfg = plain_config();

  replay::Transition t;
  t.state = {1.0};
  t.next_state = {1.0};
  t.action = 0;
  t.reward = 1.0;  // equals Q(s, 0), so the TD error is zero
  t.terminal = true;
  t.mask = {1};
  std::vector<WeightedTransition> batch{{&t, 1.0}};
  CHECK(composite_loss(batch, net, net, cfg, nullptr, nullptr).total == 0.0);

  t.is_demo = true;
  cfg.lambda_margin = 1.0;
  const auto one = composite_loss(batch, net, net, cfg, nullptr, nullptr);
  CHECK(one.total == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(one.margin == doctest::Approx(0.3));

  // Linearity in lambda2 with a non-zero TD part.
  t.reward = 0.2;
  cfg.lambda_margin = 1.0;
  const auto a = composite_loss(batch, net, net, cfg, nullptr, nullptr);
  cfg.lambda_margin = 2.0;
  const auto b = composite_loss(batch, net, net, cfg, nullptr, nullptr);
  CHECK(a.td > 0.0);
  CHECK(b.total - b.td == doctest::Approx(2.0 * (a.total - a.td)));

  // The margin applies to demonstrations only.
  t.is_demo = false;
  CHECK(composite_loss(batch, net, net, cfg, nullptr, nullptr).margin == 0.0);
}

TEST_CASE("single-head composite loss equals prioritized double DQN") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const nn::NetworkSpec spec{3, {5, 4}, 3, nn::OutputKind::bootstrapped, 1};
    const auto online = random_network(rng, spec);
    const auto target = random_network(rng, spec);
    AgentConfig cfg = plain_config();
    cfg.gamma = 0.93;

    std::vector<replay::Transition> store;
    for (int i = 0; i < 8; ++i) store.push_back(random_transition(rng, 3, 3, 1));
    std::vector<WeightedTransition> batch;
    std::vector<double> y;
    for (auto& t : store) {
      batch.push_back({&t, uniform(rng, 0.1, 1.0)});
      double target_value = t.reward;
      if (!t.terminal) {
        const auto qo = arld::testing::reference_q(online, t.next_state, 0, nullptr);
        const auto qt = arld::testing::reference_q(target, t.next_state, 0, nullptr);
        std::size_t best = 0;
        for (std::size_t a = 1; a < qo.size(); ++a) if (qo[a] > qo[best]) best = a;
        target_value += cfg.gamma * qt[best];
      }
      y.push_back(target_value);
    }

    auto probe = online;
    auto oracle_loss = [&] {
      double l = 0.0;
      for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto q = arld::testing::reference_q(probe, batch[i].transition->state, 0, nullptr);
        const double d = y[i] - q[batch[i].transition->action];
        l += batch[i].weight * d * d;
      }
      return l / static_cast<double>(batch.size());
    };

    nn::QNetwork grads = online.zeros_like();
    const auto loss = composite_loss(batch, online, target, cfg, nullptr, &grads);
    CHECK(loss.total == doctest::Approx(oracle_loss()).epsilon(1e-10));
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const auto q = arld::testing::reference_q(online, batch[i].transition->state, 0, nullptr);
      CHECK(loss.td_errors[i] == doctest::Approx(std::abs(y[i] - q[batch[i].transition->action])).epsilon(1e-10));
    }

    auto params = probe.parameters();
    auto gparams = grads.parameters();
    for (std::size_t p = 0; p < params.size(); ++p) {
      for (std::size_t k = 0; k < params[p]->size(); ++k) {
        const double fd = arld::testing::central_difference(oracle_loss, (*params[p])[k]);
        CHECK(arld::testing::relative_error((*gparams[p])[k], fd) < 1e-5);
      }
    }
  }
}

TEST_CASE("masked-out heads receive no gradient and the trunk is normalised") {
  Rng rng(2);
  const nn::NetworkSpec spec{2, {4}, 2, nn::OutputKind::bootstrapped, 3};
  const auto net = random_network(rng, spec);
  AgentConfig cfg = plain_config();
  cfg.heads = 3;
  auto t = random_transition(rng, 2, 2, 3);
  t.mask = {1, 0, 1};
  std::vector<WeightedTransition> batch{{&t, 1.0}};
  nn::QNetwork grads = net.zeros_like();
  composite_loss(batch, net, net, cfg, nullptr, &grads);
  for (double g : grads.heads()[1].weights.values()) CHECK(g == 0.0);
  for (double g : grads.heads()[1].bias.values()) CHECK(g == 0.0);

  // Trunk gradient = d(mean head loss)/d(trunk); head gradient = d(own loss)/d(head).
  auto probe = net;
  auto mean_loss = [&] { return composite_loss(batch, probe, net, cfg, nullptr, nullptr).total; };
  auto tp = probe.parameters();
  auto gp = grads.parameters();
  for (std::size_t k = 0; k < tp[0]->size(); ++k) {
    const double fd = arld::testing::central_difference(mean_loss, (*tp[0])[k]);
    CHECK(arld::testing::relative_error((*gp[0])[k], fd) < 1e-5);
  }
  for (std::size_t k = 0; k < probe.heads()[0].weights.size(); ++k) {
    const double fd = arld::testing::central_difference(mean_loss, probe.heads()[0].weights[k]);
    CHECK(arld::testing::relative_error(grads.heads()[0].weights[k], 3.0 * fd) < 1e-5);
  }
}

TEST_CASE("n-step and l2 terms") {
  const auto net = fixture_network();
  AgentConfig cfg = plain_config();
  replay::Transition t;
  t.state = {1.0};
  t.next_state = {1.0};
  t.action = 0;
  t.reward = 1.0;
  t.terminal = true;
  t.mask = {1};
  t.n_step = replay::NStepInfo{3.0, {1.0}, 2, true};
  std::vector<WeightedTransition> batch{{&t, 1.0}};
  cfg.lambda_n_step = 0.5;
  auto loss = composite_loss(batch, net, net, cfg, nullptr, nullptr);
  CHECK(loss.n_step == doctest::Approx(4.0));  // (3 - 1)^2
  CHECK(loss.total == doctest::Approx(2.0));

  // Bootstrapped N-step: 3 + gamma^2 * Q(s', argmax) with Q(s') = (1.0, 0.5).
  t.n_step->terminal = false;
  cfg.gamma = 0.5;
  loss = composite_loss(batch, net, net, cfg, nullptr, nullptr);
  CHECK(loss.n_step == doctest::Approx(std::pow(3.0 + 0.25 - 1.0, 2)));

  cfg.lambda_n_step = 0.0;
  cfg.lambda_l2 = 0.1;
  loss = composite_loss(batch, net, net, cfg, nullptr, nullptr);
  CHECK(loss.l2 == doctest::Approx(1.0 + 1.0 + 0.25));
  CHECK(loss.total == doctest::Approx(0.1 * 2.25));
}

TEST_CASE("noisy composite loss gradient matches central differences") {
  Rng rng(8);
  const nn::NetworkSpec spec{2, {4}, 3, nn::OutputKind::noisy, 1};
  const auto net = random_network(rng, spec);
  const auto target = random_network(rng, spec);
  AgentConfig cfg = plain_config();
  cfg.variant = nn::OutputKind::noisy;
  cfg.lambda_margin = 1.0;
  std::vector<replay::Transition> store;
  for (int i = 0; i < 4; ++i) store.push_back(random_transition(rng, 2, 3, 0, 0.5));
  std::vector<WeightedTransition> batch;
  for (auto& t : store) batch.push_back({&t, 0.8});
  UpdateNoise noise{nn::sample_noise(rng, 4, 3), nn::sample_noise(rng, 4, 3),
                    nn::sample_noise(rng, 4, 3)};
  nn::QNetwork grads = net.zeros_like();
  composite_loss(batch, net, target, cfg, &noise, &grads);
  auto probe = net;
  auto f = [&] { return composite_loss(batch, probe, target, cfg, &noise, nullptr).total; };
  auto pp = probe.parameters();
  auto gp = grads.parameters();
  for (std::size_t p = 0; p < pp.size(); ++p) {
    for (std::size_t k = 0; k < pp[p]->size(); ++k) {
      const double fd = arld::testing::central_difference(f, (*pp[p])[k]);
      CHECK(arld::testing::relative_error((*gp[p])[k], fd) < 1e-4);
    }
  }
}

TEST_CASE("agent training is deterministic per seed") {
  AgentConfig cfg;
  cfg.batch_size = 8;
  cfg.hidden = {8};
  cfg.heads = 3;
  cfg.target_update_period = 5;
  auto run = [&](std::uint64_t seed) {
    Agent agent(2, 2, cfg, seed);
    replay::PrioritizedBuffer buf({64, 0.6, 1e-3, 1.0});
    Rng data(99);
    for (int i = 0; i < 40; ++i) {
      auto t = random_transition(data, 2, 2, 3);
      t.mask = agent.draw_mask();
      buf.push(t);
    }
    for (int i = 0; i < 12; ++i) agent.train_step(buf);
    return agent.online();
  };
  CHECK(run(5) == run(5));
  CHECK_FALSE(run(5) == run(6));
}

TEST_CASE("target network syncs every period updates") {
  AgentConfig cfg;
  cfg.batch_size = 4;
  cfg.hidden = {4};
  cfg.heads = 1;
  cfg.target_update_period = 3;
  Agent agent(2, 2, cfg, 1);
  replay::PrioritizedBuffer buf({16, 0.6, 1e-3, 1.0});
  Rng data(1);
  for (int i = 0; i < 8; ++i) buf.push(random_transition(data, 2, 2, 1));
  CHECK_FALSE(agent.train_step(buf).target_synced);
  CHECK_FALSE(agent.train_step(buf).target_synced);
  CHECK(agent.train_step(buf).target_synced);
  CHECK(agent.target() == agent.online());
  agent.train_step(buf);
  CHECK_FALSE(agent.target() == agent.online());
}

TEST_CASE("agent preconditions") {
  AgentConfig cfg;
  cfg.batch_size = 4;
  cfg.hidden = {4};
  Agent agent(2, 2, cfg, 1);
  replay::PrioritizedBuffer buf({16, 0.6, 1e-3, 1.0});
  Rng data(1);
  buf.push(random_transition(data, 2, 2, 10));
  CHECK_THROWS_AS(agent.train_step(buf), ContractViolation);
  CHECK_THROWS_AS(agent.pretrain(buf, 1), ContractViolation);  // not demonstrations
  replay::PrioritizedBuffer empty({4, 0.6, 1e-3, 1.0});
  CHECK_THROWS_AS(agent.pretrain(empty, 1), ContractViolation);
  agent.pretrain(empty, 0);
  cfg.gamma = 1.0;
  CHECK_THROWS_AS(Agent(2, 2, cfg, 1), ContractViolation);
}

TEST_CASE("acting: exploration schedule, head sampling and greedy evaluation") {
  AgentConfig cfg;
  cfg.hidden = {6};
  cfg.heads = 4;
  cfg.epsilon = {1.0, 0.0, 10};
  Agent agent(3, 3, cfg, 4);
  CHECK(agent.epsilon() == 1.0);
  for (int i = 0; i < 5; ++i) agent.record_env_step();
  CHECK(agent.epsilon() == doctest::Approx(0.5));
  for (int i = 0; i < 10; ++i) agent.record_env_step();
  CHECK(agent.epsilon() == 0.0);

  std::set<std::size_t> heads;
  for (int i = 0; i < 100; ++i) {
    agent.begin_episode();
    heads.insert(agent.active_head());
  }
  CHECK(heads.size() == 4);

  const std::vector<double> s{0.2, -0.1, 0.4};
  const auto q = agent.eval_q_values(s);
  CHECK(agent.act(s, ActMode::eval) == argmax(q));
  // With epsilon 0 the behaviour action is the active head's greedy action.
  agent.begin_episode();
  const auto head_q = nn::forward(agent.online(), s, nn::Head{agent.active_head()}).q_values;
  CHECK(agent.act(s, ActMode::train) == argmax(head_q));
}

TEST_CASE("agent save and load preserve predictions") {
  AgentConfig cfg;
  cfg.hidden = {5};
  cfg.heads = 2;
  for (auto variant : {nn::OutputKind::bootstrapped, nn::OutputKind::noisy}) {
    cfg.variant = variant;
    Agent agent(3, 2, cfg, 9);
    std::stringstream s;
    agent.save(s);
    const Agent back = Agent::load(s, 9);
    CHECK(back.online() == agent.online());
    CHECK(back.target() == agent.target());
    CHECK(back.config() == agent.config());
  }
}

TEST_CASE("one-step bandit: Q converges to the mean reward") {
  AgentConfig cfg = plain_config();
  cfg.hidden = {8};
  cfg.batch_size = 2;
  cfg.learning_rate = 1e-2;
  Agent agent(1, 2, cfg, 3);
  replay::PrioritizedBuffer buf({8, 0.6, 1e-3, 1.0});
  for (std::size_t a = 0; a < 2; ++a) {
    replay::Transition t;
    t.state = {1.0};
    t.next_state = {1.0};
    t.action = a;
    t.reward = a == 0 ? 0.25 : -0.5;
    t.terminal = true;
    t.mask = {1};
    buf.push(t);
  }
  for (int i = 0; i < 2000; ++i) agent.train_step(buf, 1.0);
  const auto q = agent.eval_q_values(std::vector<double>{1.0});
  CHECK(q[0] == doctest::Approx(0.25).epsilon(0.01));
  CHECK(q[1] == doctest::Approx(-0.5).epsilon(0.01));
}
