#include "arld/agent/agent.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "arld/error.hpp"
#include "arld/nn/checkpoint.hpp"

namespace arld::agent {

nn::NetworkSpec network_spec(std::size_t obs_dim, std::size_t num_actions, const AgentConfig& cfg) {
  nn::NetworkSpec spec;
  spec.input_dim = obs_dim;
  spec.hidden = cfg.hidden;
  spec.num_actions = num_actions;
  spec.output = cfg.variant;
  spec.heads = cfg.variant == nn::OutputKind::noisy ? 1 : cfg.heads;
  return spec;
}

Agent::Agent(std::size_t obs_dim, std::size_t num_actions, AgentConfig config, std::uint64_t seed)
    : config_(std::move(config)), rng_(seed) {
  require(config_.gamma >= 0.0 && config_.gamma < 1.0, "agent: gamma must lie in [0, 1)");
  require(config_.batch_size >= 1, "agent: batch size must be positive");
  require(config_.target_update_period >= 1, "agent: target update period must be positive");
  online_ = nn::init_network(network_spec(obs_dim, num_actions, config_), rng_);
  target_ = nn::copy_to_target(online_);
  adam_ = nn::AdamState(online_, nn::AdamOptions{.learning_rate = config_.learning_rate});
  grads_ = online_.zeros_like();
  resample_behaviour_noise();
}

void Agent::resample_behaviour_noise() {
  if (online_.output_kind() == nn::OutputKind::noisy)
    behaviour_noise_ = nn::sample_noise(rng_, online_.feature_dim(), online_.num_actions());
}

void Agent::begin_episode() {
  if (online_.output_kind() == nn::OutputKind::bootstrapped)
    active_head_ = uniform_index(rng_, online_.head_count());
}

std::size_t Agent::act(std::span<const double> state, ActMode mode) {
  if (mode == ActMode::eval) return argmax(eval_q_values(state));
  if (config_.epsilon_with_sampling && uniform01(rng_) < epsilon())
    return uniform_index(rng_, online_.num_actions());
  if (online_.output_kind() == nn::OutputKind::noisy)
    return argmax(nn::forward(online_, state, std::cref(*behaviour_noise_)).q_values);
  return argmax(nn::forward(online_, state, nn::Head{active_head_}).q_values);
}

std::vector<double> Agent::eval_q_values(std::span<const double> state) const {
  const auto features = nn::trunk_features(online_, state);
  if (online_.output_kind() == nn::OutputKind::noisy)
    return nn::output_values(online_, features, nn::MeanOutput{});
  std::vector<double> mean(online_.num_actions(), 0.0);
  for (std::size_t k = 0; k < online_.head_count(); ++k) {
    const auto q = nn::output_values(online_, features, nn::Head{k});
    for (std::size_t a = 0; a < q.size(); ++a) mean[a] += q[a];
  }
  for (double& v : mean) v /= static_cast<double>(online_.head_count());
  return mean;
}

uncertainty::UncertaintyValue Agent::uncertainty(std::span<const double> state) const {
  return uncertainty::state_uncertainty(online_, state);
}

std::vector<std::uint8_t> Agent::draw_mask() {
  return replay::draw_mask(rng_, online_.head_count(), config_.mask_probability);
}

UpdateNoise Agent::draw_update_noise() {
  const std::size_t p = online_.feature_dim(), q = online_.num_actions();
  UpdateNoise noise;
  noise.online = nn::sample_noise(rng_, p, q);
  noise.online_next = nn::sample_noise(rng_, p, q);
  noise.target_next = nn::sample_noise(rng_, p, q);
  return noise;
}

TrainDiagnostics Agent::train_step(replay::PrioritizedBuffer& buffer) {
  return train_step(buffer, config_.beta.at(env_steps_));
}

TrainDiagnostics Agent::train_step(replay::PrioritizedBuffer& buffer, double beta) {
  require(buffer.size() >= config_.batch_size, "train_step: buffer smaller than a batch");
  const auto sampled = buffer.sample(config_.batch_size, beta, rng_);
  std::vector<WeightedTransition> batch;
  batch.reserve(sampled.size());
  for (const auto& s : sampled) batch.push_back({&buffer.at(s.id), s.weight});

  std::optional<UpdateNoise> noise;
  if (online_.output_kind() == nn::OutputKind::noisy) noise = draw_update_noise();

  grads_.set_zero();
  TrainDiagnostics diag;
  diag.loss = composite_loss(batch, online_, target_, config_, noise ? &*noise : nullptr, &grads_);
  nn::adam_step(adam_, online_, grads_);

  std::vector<std::size_t> ids;
  ids.reserve(sampled.size());
  for (const auto& s : sampled) ids.push_back(s.id);
  buffer.update_priorities(ids, diag.loss.td_errors);

  ++updates_;
  if (updates_ % config_.target_update_period == 0) {
    target_ = nn::copy_to_target(online_);
    diag.target_synced = true;
  }
  resample_behaviour_noise();

  diag.epsilon = epsilon();
  diag.beta = beta;
  for (double e : diag.loss.td_errors) {
    diag.mean_abs_td += e;
    diag.max_abs_td = std::max(diag.max_abs_td, e);
  }
  diag.mean_abs_td /= static_cast<double>(diag.loss.td_errors.size());
  return diag;
}

void Agent::pretrain(replay::PrioritizedBuffer& buffer, std::size_t steps) {
  if (steps == 0) return;
  require(!buffer.empty(), "pretrain: demonstration buffer is empty");
  require(buffer.demo_count() == buffer.size(), "pretrain: buffer holds non-demonstration data");
  for (std::size_t i = 0; i < steps; ++i) train_step(buffer, config_.beta.start);
}

// Agent checkpoint: "arld-agent 1", config key/value lines, "online" network,
// "target" network, counters, "end". Optimizer moments are not persisted.
void Agent::save(std::ostream& out) const {
  const auto& c = config_;
  out << "arld-agent 1\n";
  out << "gamma " << nn::format_exact(c.gamma) << '\n'
      << "learning_rate " << nn::format_exact(c.learning_rate) << '\n'
      << "batch_size " << c.batch_size << '\n'
      << "target_update_period " << c.target_update_period << '\n'
      << "learning_starts " << c.learning_starts << '\n'
      << "lambda_n_step " << nn::format_exact(c.lambda_n_step) << '\n'
      << "lambda_margin " << nn::format_exact(c.lambda_margin) << '\n'
      << "lambda_l2 " << nn::format_exact(c.lambda_l2) << '\n'
      << "margin " << nn::format_exact(c.margin) << '\n'
      << "n_step " << c.n_step << '\n'
      << "epsilon " << nn::format_exact(c.epsilon.start) << ' ' << nn::format_exact(c.epsilon.end)
      << ' ' << c.epsilon.anneal_steps << '\n'
      << "beta " << nn::format_exact(c.beta.start) << ' ' << nn::format_exact(c.beta.end) << ' '
      << c.beta.anneal_steps << '\n'
      << "epsilon_with_sampling " << c.epsilon_with_sampling << '\n'
      << "mask_probability " << nn::format_exact(c.mask_probability) << '\n'
      << "heads " << c.heads << '\n'
      << "counters " << updates_ << ' ' << env_steps_ << '\n';
  out << "online\n";
  nn::write_network_body(out, online_);
  out << "target\n";
  nn::write_network_body(out, target_);
  out << "end\n";
}

Agent Agent::load(std::istream& in, std::uint64_t seed) {
  std::string word;
  int version = 0;
  in >> word >> version;
  if (word != "arld-agent" || version != 1) throw std::runtime_error("not an agent checkpoint");
  AgentConfig c;
  std::size_t updates = 0, env_steps = 0;
  auto real = [&in] {
    std::string token;
    in >> token;
    return nn::parse_exact(token);
  };
  while (in >> word && word != "online") {
    if (word == "gamma") c.gamma = real();
    else if (word == "learning_rate") c.learning_rate = real();
    else if (word == "batch_size") in >> c.batch_size;
    else if (word == "target_update_period") in >> c.target_update_period;
    else if (word == "learning_starts") in >> c.learning_starts;
    else if (word == "lambda_n_step") c.lambda_n_step = real();
    else if (word == "lambda_margin") c.lambda_margin = real();
    else if (word == "lambda_l2") c.lambda_l2 = real();
    else if (word == "margin") c.margin = real();
    else if (word == "n_step") in >> c.n_step;
    else if (word == "epsilon") {
      c.epsilon.start = real();
      c.epsilon.end = real();
      in >> c.epsilon.anneal_steps;
    } else if (word == "beta") {
      c.beta.start = real();
      c.beta.end = real();
      in >> c.beta.anneal_steps;
    } else if (word == "epsilon_with_sampling") in >> c.epsilon_with_sampling;
    else if (word == "mask_probability") c.mask_probability = real();
    else if (word == "heads") in >> c.heads;
    else if (word == "counters") in >> updates >> env_steps;
    else throw std::runtime_error("agent checkpoint: unknown key '" + word + "'");
  }
  nn::QNetwork online = nn::read_network_body(in);
  in >> word;
  if (word != "target") throw std::runtime_error("agent checkpoint: missing target network");
  nn::QNetwork target = nn::read_network_body(in);
  in >> word;
  if (word != "end") throw std::runtime_error("agent checkpoint: missing end marker");

  c.variant = online.output_kind();
  if (c.variant == nn::OutputKind::bootstrapped) c.heads = online.head_count();
  c.hidden = online.spec().hidden;
  Agent agent(online.input_dim(), online.num_actions(), c, seed);
  agent.online_ = std::move(online);
  agent.target_ = std::move(target);
  agent.adam_ = nn::AdamState(agent.online_, nn::AdamOptions{.learning_rate = c.learning_rate});
  agent.updates_ = updates;
  agent.env_steps_ = env_steps;
  return agent;
}

}  // namespace arld::agent
