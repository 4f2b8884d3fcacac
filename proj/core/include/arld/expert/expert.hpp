#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "arld/envs/environment.hpp"
#include "arld/expert/human_channel.hpp"
#include "arld/nn/network.hpp"
#include "arld/random.hpp"

namespace arld::expert {

enum class ExpertKind { perfect, noisy, weak_checkpoint, human };

std::string_view kind_name(ExpertKind kind);
ExpertKind parse_kind(std::string_view name);

struct ExpertStats {
  double mean = 0.0;
  double std = 0.0;
  double min = 0.0;
  double max = 0.0;
  double avg_steps = 0.0;
  double solve_rate = 0.0;  // fraction of episodes counted as solved (see SolveRule)
  std::size_t episodes = 0;

  friend bool operator==(const ExpertStats&, const ExpertStats&) = default;
};

/// When an evaluation episode counts as "solved before the end of the
/// episode". Goal tasks: the goal state was reached before the time limit.
/// Survival tasks (Cart-Pole): the return reached `survival_floor`.
struct SolveRule {
  double survival_floor = 50.0;
};

/// Context passed along with a demonstration request (used by human experts).
struct DemoContext {
  QueryRequest request;
};

/// Supplies demonstrated actions. Simulated kinds act greedily with a backing
/// network (noisy: uniformly random with probability p); the human kind
/// forwards to a HumanExpertChannel and may time out.
class ExpertPolicy {
 public:
  static ExpertPolicy perfect(std::shared_ptr<const nn::QNetwork> net);
  static ExpertPolicy noisy(std::shared_ptr<const nn::QNetwork> net, double random_probability);
  static ExpertPolicy weak_checkpoint(std::shared_ptr<const nn::QNetwork> net);
  static ExpertPolicy human(std::shared_ptr<HumanExpertChannel> channel,
                            std::chrono::milliseconds timeout);

  ExpertKind kind() const noexcept { return kind_; }
  double random_probability() const noexcept { return random_probability_; }
  const nn::QNetwork* network() const noexcept { return net_.get(); }
  std::shared_ptr<const nn::QNetwork> shared_network() const noexcept { return net_; }
  const std::optional<ExpertStats>& stats() const noexcept { return stats_; }
  void set_stats(ExpertStats stats) { stats_ = stats; }

  /// nullopt only for a human expert that did not answer in time.
  std::optional<std::size_t> demonstrate(std::span<const double> state, Rng& rng,
                                         const DemoContext* context = nullptr) const;

  /// Greedy action of the backing network (mean over heads / zero noise).
  std::size_t greedy_action(std::span<const double> state) const;

 private:
  ExpertKind kind_ = ExpertKind::perfect;
  std::shared_ptr<const nn::QNetwork> net_;
  double random_probability_ = 0.0;
  std::shared_ptr<HumanExpertChannel> channel_;
  std::chrono::milliseconds timeout_{0};
  std::optional<ExpertStats> stats_;
};

/// Greedy evaluation Q-values of a network: mean over heads, or noise-free.
std::vector<double> greedy_q_values(const nn::QNetwork& net, std::span<const double> state);

/// Runs `episodes` episodes from `seed` and summarises returns.
ExpertStats evaluate_policy(const std::function<std::size_t(std::span<const double>)>& policy,
                            envs::Task task, std::size_t episodes, std::uint64_t seed,
                            SolveRule rule = {});
ExpertStats evaluate_expert(const ExpertPolicy& expert, envs::Task task, std::size_t episodes,
                            std::uint64_t seed, SolveRule rule = {});

/// The three qualitative checkpoint criteria made concrete: (a) not perfect:
/// mean < target + not_perfect_margin; (b) std <= std_cap; (c) solve rate >=
/// min_solve_rate. A
/// min_mean floor excludes checkpoints that have barely started learning.
struct ExpertSelectionRule {
  double not_perfect_margin = 0.0;
  double std_cap = 60.0;
  double min_solve_rate = 0.95;
  double min_mean = -1e300;
  SolveRule solve;
  std::size_t eval_episodes = 100;
};

struct Checkpoint {
  std::size_t step = 0;
  std::shared_ptr<const nn::QNetwork> net;
};

struct CheckpointEvaluation {
  std::size_t step = 0;
  ExpertStats stats;
  bool qualifies = false;
};

struct WeakExpertSelection {
  ExpertPolicy expert;
  std::size_t index = 0;
  std::vector<CheckpointEvaluation> evaluations;
};

/// Earliest checkpoint satisfying every criterion. Throws
/// std::runtime_error listing per-checkpoint stats when none qualifies.
WeakExpertSelection select_weak_checkpoint(std::span<const Checkpoint> checkpoints,
                                           envs::Task task, const ExpertSelectionRule& rule,
                                           std::uint64_t seed);

bool qualifies_as_weak_expert(const ExpertStats& stats, envs::Task task,
                              const ExpertSelectionRule& rule);

/// Table of expert statistics: Mean score/std, Min. score, Avg. steps, Target score.
std::string format_expert_table(std::span<const std::pair<envs::Task, ExpertStats>> rows);

}  // namespace arld::expert
