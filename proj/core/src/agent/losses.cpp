#include "arld/agent/losses.hpp"

#include <algorithm>
#include <cmath>

#include "arld/error.hpp"

namespace arld::agent {

std::size_t argmax(std::span<const double> values) {
  require(!values.empty(), "argmax: empty input");
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

double td_target(double reward, bool terminal, double gamma,
                 std::span<const double> online_next_q, std::span<const double> target_next_q) {
  if (terminal) return reward;
  require(online_next_q.size() == target_next_q.size(), "td_target: Q-vector length mismatch");
  return reward + gamma * target_next_q[argmax(online_next_q)];
}

double n_step_target(std::span<const double> rewards, double gamma,
                     std::optional<double> bootstrap_value) {
  double target = 0.0;
  double discount = 1.0;
  for (double r : rewards) {
    target += discount * r;
    discount *= gamma;
  }
  if (bootstrap_value) target += discount * *bootstrap_value;
  return target;
}

double margin_loss(std::span<const double> q_values, std::size_t expert_action, double margin) {
  require(expert_action < q_values.size(), "margin_loss: expert action out of range");
  require(margin >= 0.0, "margin_loss: margin must be non-negative");
  double best = -INFINITY;
  for (std::size_t a = 0; a < q_values.size(); ++a)
    best = std::max(best, q_values[a] + (a == expert_action ? 0.0 : margin));
  return best - q_values[expert_action];
}

std::vector<double> margin_loss_gradient(std::span<const double> q_values,
                                         std::size_t expert_action, double margin) {
  require(expert_action < q_values.size(), "margin_loss: expert action out of range");
  std::size_t best_action = expert_action;
  double best = q_values[expert_action];
  for (std::size_t a = 0; a < q_values.size(); ++a) {
    const double v = q_values[a] + (a == expert_action ? 0.0 : margin);
    if (v > best) {
      best = v;
      best_action = a;
    }
  }
  std::vector<double> grad(q_values.size(), 0.0);
  if (best_action != expert_action) {
    grad[best_action] += 1.0;
    grad[expert_action] -= 1.0;
  }
  return grad;
}

namespace {

struct OutputChoice {
  nn::OutputSelector online;
  nn::OutputSelector online_next;
  nn::OutputSelector target_next;
};

// Q_target(s, argmax_a Q_online(s, a)) for one output.
double double_q_value(const nn::QNetwork& online, const nn::QNetwork& target,
                      const std::vector<double>& online_features,
                      const std::vector<double>& target_features, const OutputChoice& choice) {
  const auto q_online = nn::output_values(online, online_features, choice.online_next);
  const auto q_target = nn::output_values(target, target_features, choice.target_next);
  return q_target[argmax(q_online)];
}

}  // namespace

LossBreakdown composite_loss(std::span<const WeightedTransition> batch, const nn::QNetwork& online,
                             const nn::QNetwork& target, const AgentConfig& cfg,
                             const UpdateNoise* noise, nn::QNetwork* grads) {
  require(!batch.empty(), "composite_loss: empty batch");
  require(online.spec() == target.spec(), "composite_loss: online/target shape mismatch");
  const bool noisy = online.output_kind() == nn::OutputKind::noisy;

  std::vector<OutputChoice> choices;
  if (noisy) {
    if (noise) {
      choices.push_back({std::cref(noise->online), std::cref(noise->online_next),
                         std::cref(noise->target_next)});
    } else {
      choices.push_back({nn::MeanOutput{}, nn::MeanOutput{}, nn::MeanOutput{}});
    }
  } else {
    for (std::size_t k = 0; k < online.head_count(); ++k)
      choices.push_back({nn::Head{k}, nn::Head{k}, nn::Head{k}});
  }
  const double heads = static_cast<double>(choices.size());
  const double batch_size = static_cast<double>(batch.size());
  const bool use_n_step = cfg.lambda_n_step > 0.0;
  const bool use_margin = cfg.lambda_margin > 0.0;

  LossBreakdown out;
  out.td_errors.assign(batch.size(), 0.0);
  std::vector<nn::OutputGradient> output_grads;

  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& t = *batch[i].transition;
    const double w = batch[i].weight;
    const auto trace = nn::trace_trunk(online, t.state);
    require(t.action < online.num_actions(), "composite_loss: action out of range");

    std::vector<double> online_next, target_next;
    if (!t.terminal) {
      online_next = nn::trunk_features(online, t.next_state);
      target_next = nn::trunk_features(target, t.next_state);
    }
    const bool n_step_active = use_n_step && t.n_step.has_value();
    const bool n_step_bootstrap = n_step_active && !t.n_step->terminal;
    std::vector<double> online_n, target_n;
    if (n_step_bootstrap) {
      online_n = nn::trunk_features(online, t.n_step->state);
      target_n = nn::trunk_features(target, t.n_step->state);
    }

    output_grads.clear();
    double abs_td = 0.0;
    std::size_t privy = 0;
    for (std::size_t k = 0; k < choices.size(); ++k) {
      if (!noisy && !t.mask.empty() && t.mask[k] == 0) continue;
      ++privy;
      const auto& choice = choices[k];
      const auto q = nn::output_values(online, trace.features, choice.online);
      std::vector<double> dq(q.size(), 0.0);

      const double y = t.terminal ? t.reward
                                  : t.reward + cfg.gamma * double_q_value(online, target, online_next,
                                                                          target_next, choice);
      const double delta = y - q[t.action];
      out.td += w * delta * delta;
      dq[t.action] += -2.0 * w * delta / batch_size;
      abs_td += std::abs(delta);

      if (n_step_active) {
        const auto& info = *t.n_step;
        double y_n = info.discounted_return;
        if (n_step_bootstrap)
          y_n += std::pow(cfg.gamma, static_cast<double>(info.length)) *
                 double_q_value(online, target, online_n, target_n, choice);
        const double delta_n = y_n - q[t.action];
        out.n_step += w * delta_n * delta_n;
        dq[t.action] += cfg.lambda_n_step * -2.0 * w * delta_n / batch_size;
      }

      if (use_margin && t.is_demo) {
        out.margin += margin_loss(q, t.action, cfg.margin);
        const auto g = margin_loss_gradient(q, t.action, cfg.margin);
        for (std::size_t a = 0; a < dq.size(); ++a) dq[a] += cfg.lambda_margin * g[a] / batch_size;
      }

      if (grads) output_grads.push_back({choice.online, std::move(dq)});
    }
    out.td_errors[i] = privy ? abs_td / static_cast<double>(privy) : 0.0;
    if (grads && !output_grads.empty())
      nn::backward(online, trace, output_grads, *grads, 1.0 / heads);
  }

  out.td /= batch_size * heads;
  out.n_step /= batch_size * heads;
  out.margin /= batch_size * heads;

  if (cfg.lambda_l2 > 0.0) {
    auto params = online.parameters();
    std::vector<nn::Tensor*> grad_params;
    if (grads) grad_params = grads->parameters();
    for (std::size_t p = 0; p < params.size(); ++p) {
      const auto values = params[p]->values();
      for (std::size_t j = 0; j < values.size(); ++j) {
        out.l2 += values[j] * values[j];
        if (grads) (*grad_params[p])[j] += 2.0 * cfg.lambda_l2 * values[j];
      }
    }
  }

  out.total = out.td + cfg.lambda_n_step * out.n_step + cfg.lambda_margin * out.margin +
              cfg.lambda_l2 * out.l2;
  return out;
}

}  // namespace arld::agent
