#include "arld/harness/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "arld/error.hpp"

namespace arld::harness {

using nlohmann::json;

namespace {

struct TaskPreset {
  double gamma;
  double learning_rate;
  std::size_t training_steps;
  std::size_t demos;  // offline demos for DQfD, online budget for the active methods
  std::size_t memory;
  std::size_t pretrain_steps;
  double lambda;
  double t_query_bootstrapped;
  double t_query_noisy;
  std::size_t target_update_period;
  std::size_t eval_period;
  std::size_t epsilon_anneal;
};

const TaskPreset& task_preset(envs::Task task) {
  static const TaskPreset cart_pole{0.9, 1e-4, 20000, 200, 10000, 10000, 1e-5, 0.05, 0.5,
                                    100, 500, 2000};
  static const TaskPreset acrobot{0.99, 1e-4, 200000, 100, 100000, 10000, 1.0, 0.3, 0.3,
                                  1000, 5000, 20000};
  static const TaskPreset mountain_car{0.99, 1e-3, 500000, 500, 100000, 10000, 1.0, 0.1, 0.3,
                                       1000, 5000, 50000};
  switch (task) {
    case envs::Task::cart_pole: return cart_pole;
    case envs::Task::acrobot: return acrobot;
    case envs::Task::mountain_car: return mountain_car;
  }
  throw ContractViolation("unknown task");
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

void reject_unknown(const json& object, std::initializer_list<std::string_view> known,
                    std::string_view where) {
  const std::set<std::string_view> allowed(known);
  for (const auto& [key, value] : object.items()) {
    if (!allowed.contains(key)) {
      throw std::runtime_error("config: unknown key '" + key + "' in " + std::string(where));
    }
  }
}

template <typename T>
void take(const json& object, const char* key, T& field) {
  if (auto it = object.find(key); it != object.end()) field = it->get<T>();
}

void read_schedule(const json& object, agent::LinearSchedule& schedule, std::string_view where) {
  reject_unknown(object, {"start", "end", "anneal_steps"}, where);
  take(object, "start", schedule.start);
  take(object, "end", schedule.end);
  take(object, "anneal_steps", schedule.anneal_steps);
}

json schedule_json(const agent::LinearSchedule& s) {
  return {{"start", s.start}, {"end", s.end}, {"anneal_steps", s.anneal_steps}};
}

}  // namespace

std::string_view method_name(Method method) {
  switch (method) {
    case Method::dqn: return "DQN";
    case Method::dqfd: return "DQfD";
    case Method::gdqn: return "GDQN";
    case Method::bdqn: return "BDQN";
    case Method::adqn: return "ADQN";
    case Method::adqnp: return "ADQNP";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  const std::string n = lower(name);
  for (Method m : {Method::dqn, Method::dqfd, Method::gdqn, Method::bdqn, Method::adqn,
                   Method::adqnp}) {
    if (lower(method_name(m)) == n) return m;
  }
  throw std::invalid_argument("unknown method: " + std::string(name));
}

std::string_view variant_name(nn::OutputKind variant) {
  return variant == nn::OutputKind::noisy ? "noisy" : "bootstrapped";
}

nn::OutputKind parse_variant(std::string_view name) {
  const std::string n = lower(name);
  if (n == "bootstrapped" || n == "b") return nn::OutputKind::bootstrapped;
  if (n == "noisy" || n == "n") return nn::OutputKind::noisy;
  throw std::invalid_argument("unknown variant: " + std::string(name));
}

std::string method_label(Method method, nn::OutputKind variant) {
  return std::string(method_name(method)) +
         (variant == nn::OutputKind::noisy ? "-N" : "-B");
}

MethodTraits traits(Method method) {
  using query::QueryCriterion;
  switch (method) {
    case Method::dqn: return {false, false, false, QueryCriterion::none};
    case Method::dqfd: return {true, true, false, QueryCriterion::none};
    case Method::gdqn: return {true, false, true, QueryCriterion::greedy};
    case Method::bdqn: return {true, false, true, QueryCriterion::bernoulli};
    case Method::adqn: return {true, false, true, QueryCriterion::uncertainty};
    case Method::adqnp: return {true, true, true, QueryCriterion::uncertainty};
  }
  throw ContractViolation("unknown method");
}

ExperimentConfig preset(envs::Task task, Method method, nn::OutputKind variant) {
  const TaskPreset& p = task_preset(task);
  ExperimentConfig c;
  c.task = task;
  c.method = method;
  c.agent.gamma = p.gamma;
  c.agent.learning_rate = p.learning_rate;
  c.agent.lambda_margin = p.lambda;
  c.agent.target_update_period = p.target_update_period;
  c.agent.epsilon = {0.9, 0.01, p.epsilon_anneal};
  c.agent.beta = {0.4, 1.0, p.training_steps};
  c.agent.variant = variant;
  c.replay.capacity = p.memory;
  c.query.t_query = variant == nn::OutputKind::noisy ? p.t_query_noisy : p.t_query_bootstrapped;
  c.training_steps = p.training_steps;
  c.eval_period = p.eval_period;
  c.pretrain_steps = p.pretrain_steps;
  if (method == Method::dqfd) c.demo_count = p.demos;
  if (traits(method).interaction) c.budget = p.demos;
  return c;
}

DemoPlan demo_plan(const ExperimentConfig& config) {
  DemoPlan plan;
  switch (config.method) {
    case Method::dqn: break;
    case Method::dqfd: plan.pretrain_demos = config.demo_count; break;
    case Method::gdqn:
    case Method::bdqn:
    case Method::adqn: plan.online_budget = config.budget; break;
    case Method::adqnp:
      plan.pretrain_demos = config.budget / 2;
      plan.online_budget = config.budget - plan.pretrain_demos;
      break;
  }
  return plan;
}

double bernoulli_probability(const ExperimentConfig& config) {
  if (config.bernoulli_probability >= 0.0) return config.bernoulli_probability;
  if (config.training_steps == 0) return 0.0;
  const double q = static_cast<double>(demo_plan(config).online_budget) /
                   static_cast<double>(config.training_steps);
  return std::min(q, 1.0);
}

ExperimentConfig parse_config(std::string_view json_text) {
  const json root = json::parse(json_text);
  if (!root.is_object()) throw std::runtime_error("config: top level must be an object");
  reject_unknown(root,
                 {"schema_version", "task", "method", "variant", "agent", "replay", "query",
                  "demo_count", "budget", "pretrain_steps", "training_steps", "eval_period",
                  "eval_episodes", "seeds", "bernoulli_probability", "expert"},
                 "top level");
  const int version = root.value("schema_version", 1);
  if (version != 1) {
    throw std::runtime_error("config: unsupported schema_version " + std::to_string(version));
  }
  const auto task = envs::parse_task(root.value("task", std::string("cartpole")));
  const auto method = parse_method(root.value("method", std::string("DQN")));
  const auto variant = parse_variant(root.value("variant", std::string("bootstrapped")));
  ExperimentConfig c = preset(task, method, variant);

  take(root, "demo_count", c.demo_count);
  take(root, "budget", c.budget);
  take(root, "pretrain_steps", c.pretrain_steps);
  take(root, "training_steps", c.training_steps);
  take(root, "eval_period", c.eval_period);
  take(root, "eval_episodes", c.eval_episodes);
  take(root, "seeds", c.seeds);
  take(root, "bernoulli_probability", c.bernoulli_probability);

  if (auto it = root.find("agent"); it != root.end()) {
    const json& a = *it;
    reject_unknown(a,
                   {"gamma", "learning_rate", "batch_size", "target_update_period",
                    "learning_starts", "lambda1", "lambda2", "lambda3", "margin", "n_step",
                    "epsilon", "beta", "epsilon_with_sampling", "heads", "hidden",
                    "mask_probability"},
                   "agent");
    auto& g = c.agent;
    take(a, "gamma", g.gamma);
    take(a, "learning_rate", g.learning_rate);
    take(a, "batch_size", g.batch_size);
    take(a, "target_update_period", g.target_update_period);
    take(a, "learning_starts", g.learning_starts);
    take(a, "lambda1", g.lambda_n_step);
    take(a, "lambda2", g.lambda_margin);
    take(a, "lambda3", g.lambda_l2);
    take(a, "margin", g.margin);
    take(a, "n_step", g.n_step);
    if (a.contains("epsilon")) read_schedule(a.at("epsilon"), g.epsilon, "agent.epsilon");
    if (a.contains("beta")) read_schedule(a.at("beta"), g.beta, "agent.beta");
    take(a, "epsilon_with_sampling", g.epsilon_with_sampling);
    take(a, "heads", g.heads);
    take(a, "hidden", g.hidden);
    take(a, "mask_probability", g.mask_probability);
  }
  if (auto it = root.find("replay"); it != root.end()) {
    reject_unknown(*it, {"capacity", "alpha", "eps_agent", "eps_demo"}, "replay");
    take(*it, "capacity", c.replay.capacity);
    take(*it, "alpha", c.replay.alpha);
    take(*it, "eps_agent", c.replay.eps_agent);
    take(*it, "eps_demo", c.replay.eps_demo);
  }
  if (auto it = root.find("query"); it != root.end()) {
    reject_unknown(*it, {"t_query", "window_size", "session_len"}, "query");
    take(*it, "t_query", c.query.t_query);
    take(*it, "window_size", c.query.window_size);
    take(*it, "session_len", c.query.session_len);
  }
  if (auto it = root.find("expert"); it != root.end()) {
    reject_unknown(*it, {"kind", "random_probability", "checkpoint", "human_timeout_ms"},
                   "expert");
    if (it->contains("kind")) c.expert.kind = expert::parse_kind(it->at("kind").get<std::string>());
    take(*it, "random_probability", c.expert.random_probability);
    take(*it, "checkpoint", c.expert.checkpoint);
    if (it->contains("human_timeout_ms")) {
      c.expert.human_timeout = std::chrono::milliseconds(it->at("human_timeout_ms").get<long>());
    }
  }

  if (!(c.agent.gamma >= 0.0 && c.agent.gamma < 1.0)) {
    throw std::runtime_error("config: gamma must lie in [0, 1)");
  }
  if (c.eval_period == 0) throw std::runtime_error("config: eval_period must be positive");
  if (c.query.session_len == 0) throw std::runtime_error("config: session_len must be positive");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string config_to_json(const ExperimentConfig& c) {
  const auto& g = c.agent;
  json root = {
      {"schema_version", c.schema_version},
      {"task", envs::task_name(c.task)},
      {"method", method_name(c.method)},
      {"variant", variant_name(g.variant)},
      {"demo_count", c.demo_count},
      {"budget", c.budget},
      {"pretrain_steps", c.pretrain_steps},
      {"training_steps", c.training_steps},
      {"eval_period", c.eval_period},
      {"eval_episodes", c.eval_episodes},
      {"seeds", c.seeds},
      {"bernoulli_probability", c.bernoulli_probability},
      {"agent",
       {{"gamma", g.gamma},
        {"learning_rate", g.learning_rate},
        {"batch_size", g.batch_size},
        {"target_update_period", g.target_update_period},
        {"learning_starts", g.learning_starts},
        {"lambda1", g.lambda_n_step},
        {"lambda2", g.lambda_margin},
        {"lambda3", g.lambda_l2},
        {"margin", g.margin},
        {"n_step", g.n_step},
        {"epsilon", schedule_json(g.epsilon)},
        {"beta", schedule_json(g.beta)},
        {"epsilon_with_sampling", g.epsilon_with_sampling},
        {"heads", g.heads},
        {"hidden", g.hidden},
        {"mask_probability", g.mask_probability}}},
      {"replay",
       {{"capacity", c.replay.capacity},
        {"alpha", c.replay.alpha},
        {"eps_agent", c.replay.eps_agent},
        {"eps_demo", c.replay.eps_demo}}},
      {"query",
       {{"t_query", c.query.t_query},
        {"window_size", c.query.window_size},
        {"session_len", c.query.session_len}}},
      {"expert",
       {{"kind", expert::kind_name(c.expert.kind)},
        {"random_probability", c.expert.random_probability},
        {"checkpoint", c.expert.checkpoint},
        {"human_timeout_ms", c.expert.human_timeout.count()}}},
  };
  return root.dump(2);
}

std::vector<std::uint64_t> parse_seed_range(std::string_view text) {
  auto parse_one = [](std::string_view s) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
      throw std::invalid_argument("bad seed: " + std::string(s));
    }
    return v;
  };
  std::vector<std::uint64_t> seeds;
  if (auto dots = text.find(".."); dots != std::string_view::npos) {
    const auto lo = parse_one(text.substr(0, dots));
    const auto hi = parse_one(text.substr(dots + 2));
    if (hi < lo) throw std::invalid_argument("empty seed range");
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto end = comma == std::string_view::npos ? text.size() : comma;
    seeds.push_back(parse_one(text.substr(start, end - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return seeds;
}

}  // namespace arld::harness
