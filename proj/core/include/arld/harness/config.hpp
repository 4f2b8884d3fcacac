#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "arld/agent/config.hpp"
#include "arld/envs/environment.hpp"
#include "arld/expert/expert.hpp"
#include "arld/query/query_controller.hpp"
#include "arld/replay/prioritized_buffer.hpp"

namespace arld::harness {

enum class Method { dqn, dqfd, gdqn, bdqn, adqn, adqnp };

std::string_view method_name(Method method);
Method parse_method(std::string_view name);
std::string_view variant_name(nn::OutputKind variant);
nn::OutputKind parse_variant(std::string_view name);
/// e.g. "ADQN-B", "DQfD-N".
std::string method_label(Method method, nn::OutputKind variant);

/// Which ingredients a method uses.
struct MethodTraits {
  bool demonstrations = false;
  bool pretraining = false;
  bool interaction = false;
  query::QueryCriterion criterion = query::QueryCriterion::none;
};
MethodTraits traits(Method method);

struct ExpertConfig {
  expert::ExpertKind kind = expert::ExpertKind::weak_checkpoint;
  double random_probability = 0.4;  // noisy kind
  std::string checkpoint;           // network file; empty = build one with make-expert
  std::chrono::milliseconds human_timeout{15000};

  friend bool operator==(const ExpertConfig&, const ExpertConfig&) = default;
};

struct ExperimentConfig {
  int schema_version = 1;
  envs::Task task = envs::Task::cart_pole;
  Method method = Method::dqn;
  agent::AgentConfig agent;
  replay::ReplayOptions replay;
  query::QueryConfig query;  // budget is filled from `budget` by demo_plan()
  std::size_t demo_count = 0;  // offline demonstrations for DQfD
  std::size_t budget = 0;      // online expert steps for the active methods
  std::size_t pretrain_steps = 0;
  std::size_t training_steps = 0;
  std::size_t eval_period = 500;
  std::size_t eval_episodes = 20;
  std::vector<std::uint64_t> seeds{0};
  /// Negative: budget / training_steps, computed once at start.
  double bernoulli_probability = -1.0;
  ExpertConfig expert;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Shipped per-task hyper-parameters for a method and network variant.
ExperimentConfig preset(envs::Task task, Method method, nn::OutputKind variant);

/// How many demonstrations go to pretraining and to the online budget.
/// ADQNP splits the budget in half between the two.
struct DemoPlan {
  std::size_t pretrain_demos = 0;
  std::size_t online_budget = 0;
};
DemoPlan demo_plan(const ExperimentConfig& config);

double bernoulli_probability(const ExperimentConfig& config);

/// Config files are JSON objects. "task", "method" and "variant" select a
/// preset; every other key overrides one preset field. Unknown keys are
/// rejected. "schema_version" must be 1 when present.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& config);

/// "3", "0..19" or "1,4,7".
std::vector<std::uint64_t> parse_seed_range(std::string_view text);

}  // namespace arld::harness
