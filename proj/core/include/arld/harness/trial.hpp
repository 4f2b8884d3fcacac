#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "arld/envs/environment.hpp"
#include "arld/expert/expert.hpp"
#include "arld/harness/config.hpp"
#include "arld/nn/network.hpp"
#include "arld/replay/transition.hpp"

namespace arld::harness {

struct EvalPoint {
  std::size_t step = 0;
  double mean_score = 0.0;
  friend bool operator==(const EvalPoint&, const EvalPoint&) = default;
};

struct QueryEvent {
  std::size_t step = 0;
  double uncertainty = 0.0;
  std::optional<double> threshold;
  bool decision = true;
  std::size_t budget_left = 0;
  friend bool operator==(const QueryEvent&, const QueryEvent&) = default;
};

struct RunRecord {
  std::uint64_t seed = 0;
  std::string label;
  std::vector<EvalPoint> curve;
  std::vector<QueryEvent> query_events;  // fired queries only
  std::optional<std::size_t> steps_to_solve;
  std::size_t pretrain_demos = 0;
  std::size_t online_budget = 0;
  std::size_t charged_demos = 0;
  std::size_t stored_online_demos = 0;
  std::size_t abandoned_queries = 0;
  std::size_t pretrain_updates = 0;
  std::size_t agent_actions = 0;
  bool aborted = false;
  std::string error;

  std::size_t total_demonstrations() const noexcept { return pretrain_demos + charged_demos; }
  double final_score() const noexcept { return curve.empty() ? 0.0 : curve.back().mean_score; }
  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/// Optional observers of a running trial.
struct TrialHooks {
  std::ostream* log = nullptr;  // one JSON record per environment step
  std::string run_id = "run";
  std::function<void(std::size_t step, double score)> on_eval;
  std::function<void(std::size_t step, std::size_t action, std::size_t budget_left)> on_demo;
  std::function<void(std::size_t step, const envs::Environment& env)> on_state;
  std::size_t checkpoint_period = 0;
  std::function<void(std::size_t step, const nn::QNetwork& net)> on_checkpoint;
  /// Every action the expert supplied, in order (for replay tests).
  std::vector<std::size_t>* expert_actions = nullptr;
};

/// Trains one agent under `config` with `seed`. `expert` is required for
/// methods that use demonstrations. Contract violations abort the trial and
/// are reported in the record instead of propagating.
RunRecord run_trial(const ExperimentConfig& config, std::uint64_t seed,
                    const expert::ExpertPolicy* expert, const TrialHooks& hooks = {});

/// Mean greedy return of `net` over `episodes` fresh episodes.
double evaluate_network(const nn::QNetwork& net, envs::Task task, std::size_t episodes,
                        std::uint64_t seed);

/// Runs the expert from fresh episodes, storing every step as a demonstration
/// until `count` transitions exist. N-step lookahead is attached when n > 0.
std::vector<replay::Transition> collect_demonstrations(const expert::ExpertPolicy& expert,
                                                       envs::Task task, std::size_t count,
                                                       std::uint64_t seed, std::size_t n_step = 0,
                                                       double gamma = 0.99);

struct ExpertBuild {
  expert::WeakExpertSelection selection;
  std::vector<expert::Checkpoint> checkpoints;
  std::shared_ptr<const nn::QNetwork> final_network;
  RunRecord training_record;
};

expert::ExpertSelectionRule default_selection_rule(envs::Task task);

/// Trains a DQN agent, snapshots it every `checkpoint_period` steps and picks
/// the earliest checkpoint that qualifies as a policy-consistent weak expert.
ExpertBuild make_weak_expert(envs::Task task, nn::OutputKind variant, std::uint64_t seed,
                             std::size_t checkpoint_period,
                             const expert::ExpertSelectionRule& rule);

}  // namespace arld::harness
