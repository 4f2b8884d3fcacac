#include "arld/harness/trial.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <ostream>

#include "json.hpp"

#include "arld/agent/agent.hpp"
#include "arld/agent/losses.hpp"
#include "arld/error.hpp"
#include "arld/query/query_controller.hpp"
#include "arld/replay/n_step.hpp"
#include "arld/replay/prioritized_buffer.hpp"

namespace arld::harness {

namespace {

// Independent random streams of one trial.
enum Stream : std::uint64_t {
  agent_stream = 1,
  expert_stream = 2,
  query_stream = 3,
  demo_stream = 4,
  env_stream = 5,
  eval_stream = 6,
};

std::int64_t epoch_ms_after(std::chrono::milliseconds delay) {
  const auto t = std::chrono::system_clock::now() + delay;
  return std::chrono::duration_cast<std::chrono::milliseconds>(t.time_since_epoch()).count();
}

// Routes finished transitions into the buffer, through the N-step window when
// the N-step loss is on.
class TransitionSink {
 public:
  TransitionSink(replay::PrioritizedBuffer& buffer, const agent::AgentConfig& cfg)
      : buffer_(buffer) {
    if (cfg.lambda_n_step > 0.0) window_.emplace(cfg.n_step, cfg.gamma);
  }

  void push(replay::Transition t, bool episode_end) {
    if (!window_) {
      buffer_.push(std::move(t));
      return;
    }
    for (auto& done : window_->push(std::move(t))) buffer_.push(std::move(done));
    if (episode_end) {
      for (auto& done : window_->flush()) buffer_.push(std::move(done));
    }
  }

 private:
  replay::PrioritizedBuffer& buffer_;
  std::optional<replay::NStepAccumulator> window_;
};

}  // namespace

double evaluate_network(const nn::QNetwork& net, envs::Task task, std::size_t episodes,
                        std::uint64_t seed) {
  auto policy = [&net](std::span<const double> s) {
    return agent::argmax(expert::greedy_q_values(net, s));
  };
  return expert::evaluate_policy(policy, task, episodes, seed).mean;
}

std::vector<replay::Transition> collect_demonstrations(const expert::ExpertPolicy& expert,
                                                       envs::Task task, std::size_t count,
                                                       std::uint64_t seed, std::size_t n_step,
                                                       double gamma) {
  std::vector<replay::Transition> demos;
  if (count == 0) return demos;
  demos.reserve(count);
  Rng rng(derive_seed(seed, expert_stream));
  auto env = envs::make_environment(task);
  std::optional<replay::NStepAccumulator> window;
  if (n_step > 0) window.emplace(n_step, gamma);
  auto keep = [&](std::vector<replay::Transition> done) {
    for (auto& t : done) demos.push_back(std::move(t));
  };

  std::uint64_t episode = 0;
  while (demos.size() < count) {
    auto state = env->reset(derive_seed(seed, 100 + episode++));
    std::size_t taken = 0;
    const std::size_t pending_before = demos.size();
    for (;;) {
      const auto action = expert.demonstrate(state, rng);
      if (!action) throw std::runtime_error("expert gave no demonstration");
      auto result = env->step(*action);
      replay::Transition t{state, *action, result.reward, result.next_state, result.terminal,
                           true, {}, std::nullopt};
      ++taken;
      const bool last = result.done() || pending_before + taken >= count;
      if (window) {
        keep(window->push(std::move(t)));
        if (last) keep(window->flush());
      } else {
        demos.push_back(std::move(t));
      }
      if (last) break;
      state = std::move(result.next_state);
    }
  }
  return demos;
}

RunRecord run_trial(const ExperimentConfig& config, std::uint64_t seed,
                    const expert::ExpertPolicy* expert, const TrialHooks& hooks) {
  const MethodTraits method = traits(config.method);
  require(!method.demonstrations || expert != nullptr,
          "run_trial: this method needs an expert");
  require(config.eval_period > 0, "run_trial: eval_period must be positive");

  RunRecord record;
  record.seed = seed;
  record.label = method_label(config.method, config.agent.variant);
  const DemoPlan plan = demo_plan(config);
  record.online_budget = plan.online_budget;

  try {
    const envs::EnvSpec& spec = envs::spec_for(config.task);
    agent::Agent learner(spec.obs_dim, spec.num_actions, config.agent,
                         derive_seed(seed, agent_stream));
    replay::PrioritizedBuffer buffer(config.replay);
    Rng expert_rng(derive_seed(seed, expert_stream));
    Rng query_rng(derive_seed(seed, query_stream));

    if (plan.pretrain_demos > 0) {
      const std::size_t n = config.agent.lambda_n_step > 0.0 ? config.agent.n_step : 0;
      auto demos = collect_demonstrations(*expert, config.task, plan.pretrain_demos,
                                          derive_seed(seed, demo_stream), n, config.agent.gamma);
      for (auto& d : demos) {
        d.mask = learner.draw_mask();
        buffer.push(std::move(d));
      }
      record.pretrain_demos = demos.size();
      if (method.pretraining) {
        learner.pretrain(buffer, config.pretrain_steps);
        record.pretrain_updates = config.pretrain_steps;
      }
    }

    query::QueryConfig qcfg = config.query;
    qcfg.budget = plan.online_budget;
    query::QueryController controller(method.criterion, qcfg, bernoulli_probability(config));
    TransitionSink sink(buffer, config.agent);

    auto env = envs::make_environment(config.task);
    auto state = env->reset(derive_seed(seed, env_stream));
    learner.begin_episode();
    const std::size_t warmup = std::max(config.agent.batch_size, config.agent.learning_starts);
    std::size_t eval_index = 0;

    for (std::size_t step = 1; step <= config.training_steps; ++step) {
      std::optional<double> u;
      if (controller.needs_uncertainty()) u = learner.uncertainty(state).value;
      const query::StepPlan step_plan = controller.plan_step(u, query_rng);
      if (step_plan.query_fired) {
        record.query_events.push_back(
            {step, u.value_or(0.0), step_plan.threshold, true, controller.budget_left()});
      }

      std::size_t action = 0;
      bool demo = false;
      if (step_plan.expert) {
        std::optional<std::size_t> answer;
        if (expert->kind() == expert::ExpertKind::human) {
          expert::DemoContext ctx;
          ctx.request.run_id = hooks.run_id;
          ctx.request.step = step;
          ctx.request.task = std::string(envs::task_name(config.task));
          ctx.request.render_state = env->render_state();
          ctx.request.q_values = learner.eval_q_values(state);
          ctx.request.uncertainty = u ? *u : learner.uncertainty(state).value;
          ctx.request.budget_left = controller.budget_left();
          ctx.request.deadline_ms = epoch_ms_after(config.expert.human_timeout);
          answer = expert->demonstrate(state, expert_rng, &ctx);
        } else {
          answer = expert->demonstrate(state, expert_rng);
        }
        if (answer && *answer < spec.num_actions) {
          action = *answer;
          demo = true;
          controller.charge_demo_step();
          if (hooks.expert_actions) hooks.expert_actions->push_back(action);
          if (hooks.on_demo) hooks.on_demo(step, action, controller.budget_left());
        } else {
          controller.abandon_session();
          ++record.abandoned_queries;
        }
      }
      if (!demo) {
        action = learner.act(state, agent::ActMode::train);
        ++record.agent_actions;
      }

      auto result = env->step(action);
      learner.record_env_step();
      if (hooks.on_state) hooks.on_state(step, *env);
      if (demo) ++record.stored_online_demos;
      sink.push({state, action, result.reward, result.next_state, result.terminal, demo,
                 learner.draw_mask(), std::nullopt},
                result.done());

      std::optional<agent::TrainDiagnostics> diag;
      if (buffer.size() >= warmup) diag = learner.train_step(buffer);

      if (hooks.log) {
        nlohmann::json line = {{"step", step},
                               {"action", action},
                               {"reward", result.reward},
                               {"expert", demo},
                               {"query", step_plan.query_fired},
                               {"budget_left", controller.budget_left()},
                               {"epsilon", learner.epsilon()}};
        line["uncertainty"] = u ? nlohmann::json(*u) : nlohmann::json(nullptr);
        line["threshold"] =
            step_plan.threshold ? nlohmann::json(*step_plan.threshold) : nlohmann::json(nullptr);
        if (diag) {
          line["loss"] = {{"total", diag->loss.total}, {"td", diag->loss.td},
                          {"n_step", diag->loss.n_step}, {"margin", diag->loss.margin},
                          {"l2", diag->loss.l2}};
        }
        *hooks.log << line.dump() << '\n';
      }

      if (result.done()) {
        state = env->reset();
        learner.begin_episode();
        controller.end_episode();
      } else {
        state = std::move(result.next_state);
      }

      if (hooks.checkpoint_period > 0 && hooks.on_checkpoint &&
          step % hooks.checkpoint_period == 0) {
        hooks.on_checkpoint(step, learner.online());
      }
      if (step % config.eval_period == 0) {
        const double score =
            evaluate_network(learner.online(), config.task, config.eval_episodes,
                             derive_seed(derive_seed(seed, eval_stream), eval_index++));
        record.curve.push_back({step, score});
        if (!record.steps_to_solve && score >= spec.target_score) record.steps_to_solve = step;
        if (hooks.on_eval) hooks.on_eval(step, score);
      }
    }
  } catch (const std::exception& e) {
    record.aborted = true;
    record.error = e.what();
  }
  record.charged_demos = record.stored_online_demos;
  return record;
}

expert::ExpertSelectionRule default_selection_rule(envs::Task task) {
  expert::ExpertSelectionRule rule;
  switch (task) {
    case envs::Task::cart_pole:
      rule.std_cap = 60.0;
      rule.min_mean = 120.0;
      break;
    case envs::Task::acrobot:
      rule.std_cap = 80.0;
      rule.min_mean = -200.0;
      break;
    case envs::Task::mountain_car:
      rule.std_cap = 40.0;
      rule.min_mean = -170.0;
      break;
  }
  return rule;
}

ExpertBuild make_weak_expert(envs::Task task, nn::OutputKind variant, std::uint64_t seed,
                             std::size_t checkpoint_period,
                             const expert::ExpertSelectionRule& rule) {
  require(checkpoint_period > 0, "make_weak_expert: checkpoint period must be positive");
  ExperimentConfig config = preset(task, Method::dqn, variant);
  ExpertBuild build;
  TrialHooks hooks;
  hooks.checkpoint_period = checkpoint_period;
  hooks.on_checkpoint = [&build](std::size_t step, const nn::QNetwork& net) {
    build.checkpoints.push_back({step, std::make_shared<const nn::QNetwork>(net)});
  };
  build.training_record = run_trial(config, seed, nullptr, hooks);
  if (build.training_record.aborted) {
    throw std::runtime_error("expert training aborted: " + build.training_record.error);
  }
  require(!build.checkpoints.empty(), "make_weak_expert: no checkpoints were taken");
  build.final_network = build.checkpoints.back().net;
  build.selection =
      expert::select_weak_checkpoint(build.checkpoints, task, rule, derive_seed(seed, 99));
  return build;
}

}  // namespace arld::harness
