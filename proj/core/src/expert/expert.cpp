#include "arld/expert/expert.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "arld/agent/losses.hpp"
#include "arld/error.hpp"

namespace arld::expert {

std::string_view kind_name(ExpertKind kind) {
  switch (kind) {
    case ExpertKind::perfect: return "perfect";
    case ExpertKind::noisy: return "noisy";
    case ExpertKind::weak_checkpoint: return "weak";
    case ExpertKind::human: return "human";
  }
  return "unknown";
}

ExpertKind parse_kind(std::string_view name) {
  if (name == "perfect") return ExpertKind::perfect;
  if (name == "noisy") return ExpertKind::noisy;
  if (name == "weak") return ExpertKind::weak_checkpoint;
  if (name == "human") return ExpertKind::human;
  throw std::invalid_argument("unknown expert kind '" + std::string(name) + "'");
}

ExpertPolicy ExpertPolicy::perfect(std::shared_ptr<const nn::QNetwork> net) {
  require(net != nullptr, "expert: missing network");
  ExpertPolicy e;
  e.kind_ = ExpertKind::perfect;
  e.net_ = std::move(net);
  return e;
}

ExpertPolicy ExpertPolicy::noisy(std::shared_ptr<const nn::QNetwork> net,
                                 double random_probability) {
  require(random_probability >= 0.0 && random_probability <= 1.0,
          "expert: random-action probability must lie in [0, 1]");
  ExpertPolicy e = perfect(std::move(net));
  e.kind_ = ExpertKind::noisy;
  e.random_probability_ = random_probability;
  return e;
}

ExpertPolicy ExpertPolicy::weak_checkpoint(std::shared_ptr<const nn::QNetwork> net) {
  ExpertPolicy e = perfect(std::move(net));
  e.kind_ = ExpertKind::weak_checkpoint;
  return e;
}

ExpertPolicy ExpertPolicy::human(std::shared_ptr<HumanExpertChannel> channel,
                                 std::chrono::milliseconds timeout) {
  require(channel != nullptr, "expert: missing human channel");
  ExpertPolicy e;
  e.kind_ = ExpertKind::human;
  e.channel_ = std::move(channel);
  e.timeout_ = timeout;
  return e;
}

std::vector<double> greedy_q_values(const nn::QNetwork& net, std::span<const double> state) {
  const auto features = nn::trunk_features(net, state);
  if (net.output_kind() == nn::OutputKind::noisy)
    return nn::output_values(net, features, nn::MeanOutput{});
  std::vector<double> mean(net.num_actions(), 0.0);
  for (std::size_t k = 0; k < net.head_count(); ++k) {
    const auto q = nn::output_values(net, features, nn::Head{k});
    for (std::size_t a = 0; a < q.size(); ++a) mean[a] += q[a];
  }
  for (double& v : mean) v /= static_cast<double>(net.head_count());
  return mean;
}

std::size_t ExpertPolicy::greedy_action(std::span<const double> state) const {
  require(net_ != nullptr, "expert: no backing network");
  return agent::argmax(greedy_q_values(*net_, state));
}

std::optional<std::size_t> ExpertPolicy::demonstrate(std::span<const double> state, Rng& rng,
                                                     const DemoContext* context) const {
  switch (kind_) {
    case ExpertKind::perfect:
    case ExpertKind::weak_checkpoint:
      return greedy_action(state);
    case ExpertKind::noisy: {
      const bool random = uniform01(rng) < random_probability_;
      const std::size_t random_action = uniform_index(rng, net_->num_actions());
      return random ? random_action : greedy_action(state);
    }
    case ExpertKind::human: {
      QueryRequest request = context ? context->request : QueryRequest{};
      return channel_->ask(std::move(request), timeout_);
    }
  }
  return std::nullopt;
}

ExpertStats evaluate_policy(const std::function<std::size_t(std::span<const double>)>& policy,
                            envs::Task task, std::size_t episodes, std::uint64_t seed,
                            SolveRule rule) {
  require(episodes >= 1, "evaluate: need at least one episode");
  auto env = envs::make_environment(task);
  std::vector<double> returns;
  returns.reserve(episodes);
  std::size_t total_steps = 0, solved = 0;
  auto state = env->reset(seed);
  for (std::size_t ep = 0; ep < episodes; ++ep) {
    if (ep > 0) state = env->reset();
    double ret = 0.0;
    bool reached_terminal = false;
    while (!env->episode_over()) {
      const auto result = env->step(policy(state));
      ret += result.reward;
      reached_terminal = result.terminal;
      state = result.next_state;
    }
    total_steps += env->elapsed_steps();
    returns.push_back(ret);
    const bool survival_task = task == envs::Task::cart_pole;
    if (survival_task ? ret >= rule.survival_floor : reached_terminal) ++solved;
  }
  ExpertStats stats;
  stats.episodes = episodes;
  const double n = static_cast<double>(episodes);
  for (double r : returns) stats.mean += r;
  stats.mean /= n;
  for (double r : returns) stats.std += (r - stats.mean) * (r - stats.mean);
  stats.std = std::sqrt(stats.std / n);
  stats.min = *std::min_element(returns.begin(), returns.end());
  stats.max = *std::max_element(returns.begin(), returns.end());
  stats.avg_steps = static_cast<double>(total_steps) / n;
  stats.solve_rate = static_cast<double>(solved) / n;
  return stats;
}

ExpertStats evaluate_expert(const ExpertPolicy& expert, envs::Task task, std::size_t episodes,
                            std::uint64_t seed, SolveRule rule) {
  require(expert.kind() != ExpertKind::human, "evaluate_expert: cannot evaluate a human expert");
  Rng rng(derive_seed(seed, 17));
  return evaluate_policy(
      [&](std::span<const double> s) { return *expert.demonstrate(s, rng); }, task, episodes,
      seed, rule);
}

bool qualifies_as_weak_expert(const ExpertStats& stats, envs::Task task,
                              const ExpertSelectionRule& rule) {
  const double target = envs::spec_for(task).target_score;
  return stats.mean < target + rule.not_perfect_margin && stats.std <= rule.std_cap &&
         stats.solve_rate >= rule.min_solve_rate && stats.mean >= rule.min_mean;
}

WeakExpertSelection select_weak_checkpoint(std::span<const Checkpoint> checkpoints,
                                           envs::Task task, const ExpertSelectionRule& rule,
                                           std::uint64_t seed) {
  require(!checkpoints.empty(), "select_weak_checkpoint: no checkpoints");
  std::vector<CheckpointEvaluation> evaluations;
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    const auto expert = ExpertPolicy::weak_checkpoint(checkpoints[i].net);
    CheckpointEvaluation eval;
    eval.step = checkpoints[i].step;
    eval.stats = evaluate_expert(expert, task, rule.eval_episodes, seed, rule.solve);
    eval.qualifies = qualifies_as_weak_expert(eval.stats, task, rule);
    evaluations.push_back(eval);
    if (eval.qualifies) {
      WeakExpertSelection selection{expert, i, std::move(evaluations)};
      selection.expert.set_stats(eval.stats);
      return selection;
    }
  }
  std::ostringstream msg;
  msg << "select_weak_checkpoint: no checkpoint qualifies\n";
  for (const auto& e : evaluations) {
    char line[160];
    std::snprintf(line, sizeof line, "  step %zu: mean %.2f std %.2f min %.0f solve_rate %.2f\n",
                  e.step, e.stats.mean, e.stats.std, e.stats.min, e.stats.solve_rate);
    msg << line;
  }
  throw std::runtime_error(msg.str());
}

std::string format_expert_table(std::span<const std::pair<envs::Task, ExpertStats>> rows) {
  std::ostringstream out;
  out << "| Task | Mean score/std | Min. score | Avg. steps | Target score |\n"
      << "|---|---|---|---|---|\n";
  for (const auto& [task, s] : rows) {
    char line[200];
    std::snprintf(line, sizeof line, "| %s | %.2f +- %.2f | %.2f | %.2f | %.0f |\n",
                  std::string(envs::task_name(task)).c_str(), s.mean, s.std, s.min, s.avg_steps,
                  envs::spec_for(task).target_score);
    out << line;
  }
  return out.str();
}

}  // namespace arld::expert
