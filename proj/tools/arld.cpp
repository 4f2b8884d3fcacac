// Command-line front end: training runs, expert construction, demonstration
// collection, evaluation and the human-expert bridge.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "arld/expert/expert.hpp"
#include "arld/harness/aggregate.hpp"
#include "arld/harness/bridge.hpp"
#include "arld/harness/config.hpp"
#include "arld/harness/reports.hpp"
#include "arld/harness/trial.hpp"
#include "arld/nn/checkpoint.hpp"
#include "arld/replay/demo_file.hpp"

namespace fs = std::filesystem;
using namespace arld;

namespace {

struct RunOptions {
  std::string task = "cartpole";
  std::string method = "DQN";
  std::string variant = "bootstrapped";
  std::string seeds;
  std::string config;
  std::string out = "runs";
  std::string expert;
  std::uint64_t expert_seed = 1000;
  bool log = true;
};

harness::ExperimentConfig resolve_config(const RunOptions& o) {
  harness::ExperimentConfig c;
  if (!o.config.empty()) {
    c = harness::load_config(o.config);
  } else {
    c = harness::preset(envs::parse_task(o.task), harness::parse_method(o.method),
                        harness::parse_variant(o.variant));
  }
  if (!o.seeds.empty()) c.seeds = harness::parse_seed_range(o.seeds);
  if (!o.expert.empty()) c.expert.checkpoint = o.expert;
  return c;
}

std::optional<expert::ExpertPolicy> simulated_expert(const harness::ExperimentConfig& c,
                                                     std::uint64_t build_seed) {
  if (!harness::traits(c.method).demonstrations) return std::nullopt;
  std::shared_ptr<const nn::QNetwork> net;
  if (!c.expert.checkpoint.empty()) {
    net = std::make_shared<const nn::QNetwork>(nn::load_network(c.expert.checkpoint));
  } else {
    std::cerr << "no expert checkpoint given; training one (seed " << build_seed << ")\n";
    auto build = harness::make_weak_expert(c.task, c.agent.variant, build_seed, 250,
                                           harness::default_selection_rule(c.task));
    net = c.expert.kind == expert::ExpertKind::perfect ? build.final_network
                                                       : build.selection.expert.shared_network();
  }
  switch (c.expert.kind) {
    case expert::ExpertKind::perfect: return expert::ExpertPolicy::perfect(net);
    case expert::ExpertKind::noisy:
      return expert::ExpertPolicy::noisy(net, c.expert.random_probability);
    case expert::ExpertKind::weak_checkpoint: return expert::ExpertPolicy::weak_checkpoint(net);
    case expert::ExpertKind::human: break;
  }
  throw std::invalid_argument("the human expert is only available through 'serve'");
}

void write_outputs(const harness::ExperimentConfig& c, const fs::path& dir,
                   const std::vector<harness::RunRecord>& records) {
  const auto summary = harness::aggregate(records, c.training_steps);
  {
    std::ofstream csv(dir / "curve.csv");
    harness::write_curve_csv(csv, records, summary);
  }
  {
    std::ofstream out(dir / "records.jsonl");
    for (const auto& r : records) out << harness::record_to_json(r) << '\n';
  }
  const std::vector<harness::SummaryRow> rows{
      {harness::method_label(c.method, c.agent.variant), std::string(envs::task_name(c.task)),
       summary}};
  const std::string table = harness::format_summary_table(rows);
  std::ofstream(dir / "summary.md") << table;
  std::cout << table;
}

int cmd_run(const RunOptions& o) {
  const auto c = resolve_config(o);
  const auto dir = fs::path(o.out) /
                   (std::string(envs::task_name(c.task)) + "_" +
                    harness::method_label(c.method, c.agent.variant));
  fs::create_directories(dir);
  std::ofstream(dir / "config.json") << harness::config_to_json(c) << '\n';
  const auto expert = simulated_expert(c, o.expert_seed);

  std::vector<harness::RunRecord> records;
  for (const auto seed : c.seeds) {
    harness::TrialHooks hooks;
    hooks.run_id = dir.filename().string() + "_seed" + std::to_string(seed);
    std::ofstream log;
    if (o.log) {
      log.open(dir / ("run_seed" + std::to_string(seed) + ".jsonl"));
      hooks.log = &log;
    }
    auto record = harness::run_trial(c, seed, expert ? &*expert : nullptr, hooks);
    std::cerr << "seed " << seed << ": "
              << (record.aborted ? "aborted (" + record.error + ")"
                  : record.steps_to_solve ? "solved at " + std::to_string(*record.steps_to_solve)
                                          : std::string("unsolved"))
              << ", final score " << record.final_score() << '\n';
    records.push_back(std::move(record));
  }
  write_outputs(c, dir, records);
  return 0;
}

int cmd_evaluate(const std::string& checkpoint, const std::string& task, std::size_t episodes,
                 std::uint64_t seed) {
  const auto t = envs::parse_task(task);
  auto net = std::make_shared<const nn::QNetwork>(nn::load_network(checkpoint));
  const auto stats =
      expert::evaluate_expert(expert::ExpertPolicy::perfect(net), t, episodes, seed);
  const std::vector<std::pair<envs::Task, expert::ExpertStats>> rows{{t, stats}};
  std::cout << expert::format_expert_table(rows);
  return 0;
}

int cmd_make_expert(const std::string& task, const std::string& variant, std::uint64_t seed,
                    std::size_t period, const std::string& out, const std::string& final_out) {
  const auto t = envs::parse_task(task);
  auto build = harness::make_weak_expert(t, harness::parse_variant(variant), seed, period,
                                         harness::default_selection_rule(t));
  for (const auto& e : build.selection.evaluations) {
    std::cerr << "checkpoint " << e.step << ": mean " << e.stats.mean << " std " << e.stats.std
              << " min " << e.stats.min << (e.qualifies ? "  <- qualifies" : "") << '\n';
  }
  nn::save_network(out, *build.selection.expert.network());
  if (!final_out.empty()) nn::save_network(final_out, *build.final_network);
  const std::vector<std::pair<envs::Task, expert::ExpertStats>> rows{
      {t, *build.selection.expert.stats()}};
  std::cout << "selected checkpoint at step " << build.checkpoints[build.selection.index].step
            << "\n"
            << expert::format_expert_table(rows);
  return 0;
}

int cmd_collect(const std::string& task, const std::string& checkpoint, std::size_t count,
                std::uint64_t seed, const std::string& out) {
  auto net = std::make_shared<const nn::QNetwork>(nn::load_network(checkpoint));
  const auto demos = harness::collect_demonstrations(
      expert::ExpertPolicy::weak_checkpoint(net), envs::parse_task(task), count, seed);
  replay::write_demos(out, demos);
  std::cout << "wrote " << demos.size() << " demonstrations to " << out << '\n';
  return 0;
}

int cmd_serve(RunOptions o, std::uint16_t port, long timeout_ms, bool stream_state) {
  auto c = resolve_config(o);
  if (!harness::traits(c.method).interaction) {
    throw std::invalid_argument("serve needs an interactive method (GDQN, BDQN, ADQN, ADQNP)");
  }
  if (c.seeds.size() != 1) c.seeds.resize(1);
  c.expert.kind = expert::ExpertKind::human;
  c.expert.human_timeout = std::chrono::milliseconds(timeout_ms);
  if (c.method == harness::Method::adqnp) {
    throw std::invalid_argument("ADQNP pretraining demonstrations cannot come from a human");
  }

  auto channel = std::make_shared<expert::HumanExpertChannel>();
  harness::ExpertBridge bridge(channel, port);
  std::cerr << "expert bridge listening on 127.0.0.1:" << bridge.port() << '\n';
  const auto human = expert::ExpertPolicy::human(channel, c.expert.human_timeout);

  const auto dir = fs::path(o.out) / (std::string(envs::task_name(c.task)) + "_" +
                                      harness::method_label(c.method, c.agent.variant) + "_human");
  fs::create_directories(dir);
  std::ofstream log(dir / "run.jsonl");
  harness::TrialHooks hooks;
  hooks.run_id = dir.filename().string();
  hooks.log = &log;
  hooks.on_eval = [&](std::size_t step, double score) { bridge.publish_curve_point(step, score); };
  hooks.on_demo = [&](std::size_t step, std::size_t action, std::size_t left) {
    bridge.publish_confirmation(step, action, left);
  };
  const std::string task_name(envs::task_name(c.task));
  if (stream_state) {
    hooks.on_state = [&](std::size_t step, const envs::Environment& env) {
      bridge.publish_state(step, task_name, env.render_state());
    };
  }
  const auto record = harness::run_trial(c, c.seeds.front(), &human, hooks);
  channel->close();
  bridge.stop();
  write_outputs(c, dir, {record});
  return record.aborted ? 1 : 0;
}

void add_run_options(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--task", o.task, "cartpole | acrobot | mountaincar");
  cmd->add_option("--method", o.method, "DQN | DQfD | GDQN | BDQN | ADQN | ADQNP");
  cmd->add_option("--variant", o.variant, "bootstrapped | noisy");
  cmd->add_option("--seeds", o.seeds, "seed, range a..b, or list a,b,c");
  cmd->add_option("--config", o.config, "JSON config file (overrides --task/--method/--variant)");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--expert", o.expert, "expert network checkpoint");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active deep Q-learning with demonstration lab"};
  app.require_subcommand(1);

  RunOptions run_opts;
  auto* run = app.add_subcommand("run", "train agents over a range of seeds");
  add_run_options(run, run_opts);
  run->add_option("--expert-seed", run_opts.expert_seed, "seed used when an expert must be built");
  run->add_flag("!--no-log", run_opts.log, "skip the per-step run log");

  std::string checkpoint, task = "cartpole", variant = "bootstrapped", out, final_out;
  std::size_t episodes = 100, period = 250, count = 200;
  std::uint64_t seed = 0;

  auto* evaluate = app.add_subcommand("evaluate", "score a network checkpoint greedily");
  evaluate->add_option("--checkpoint", checkpoint)->required();
  evaluate->add_option("--task", task);
  evaluate->add_option("--episodes", episodes);
  evaluate->add_option("--seed", seed);

  auto* make_expert = app.add_subcommand("make-expert", "train DQN and select a weak expert");
  make_expert->add_option("--task", task);
  make_expert->add_option("--variant", variant);
  make_expert->add_option("--seed", seed);
  make_expert->add_option("--period", period, "steps between checkpoints");
  make_expert->add_option("--out", out, "selected checkpoint file")->required();
  make_expert->add_option("--final-out", final_out, "also save the last checkpoint here");

  auto* collect = app.add_subcommand("collect-demos", "write expert demonstrations as JSONL");
  collect->add_option("--task", task);
  collect->add_option("--expert", checkpoint)->required();
  collect->add_option("--count", count);
  collect->add_option("--seed", seed);
  collect->add_option("--out", out)->required();

  RunOptions serve_opts;
  serve_opts.method = "ADQN";
  std::uint16_t port = 8765;
  long timeout_ms = 15000;
  bool stream_state = false;
  auto* serve = app.add_subcommand("serve", "train with a human expert over the bridge");
  add_run_options(serve, serve_opts);
  serve->add_option("--port", port, "TCP port of the expert bridge");
  serve->add_option("--timeout-ms", timeout_ms, "per-query answer deadline");
  serve->add_flag("--stream-state", stream_state, "send state_stream frames between queries");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(run_opts);
    if (*evaluate) return cmd_evaluate(checkpoint, task, episodes, seed);
    if (*make_expert) return cmd_make_expert(task, variant, seed, period, out, final_out);
    if (*collect) return cmd_collect(task, checkpoint, count, seed, out);
    if (*serve) return cmd_serve(serve_opts, port, timeout_ms, stream_state);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
