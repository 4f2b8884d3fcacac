// Acceptance gate: one PASS/FAIL line per criterion. Criteria 1-8 are the
// property suite, 9-12 reproduce the Cart-Pole results, 13 is the long
// Acrobot study and runs only with --extended.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "arld/agent/agent.hpp"
#include "arld/agent/losses.hpp"
#include "arld/harness/aggregate.hpp"
#include "arld/harness/config.hpp"
#include "arld/harness/trial.hpp"
#include "arld/nn/network.hpp"
#include "arld/query/uncertainty_window.hpp"
#include "arld/replay/prioritized_buffer.hpp"
#include "arld/replay/segment_tree.hpp"
#include "arld/uncertainty/uncertainty.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace arld;
using arld::testing::random_vector;
using arld::testing::uniform;
using arld::testing::uniform_int;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, static_cast<double>(args)...);
  return buf;
}

// 1 -------------------------------------------------------------------------

Outcome gradient_check() {
  Rng rng(101);
  double worst = 0.0;
  std::size_t partials = 0;
  for (int n = 0; n < 50; ++n) {
    // Cycle through single-head dense, noisy and multi-head networks.
    const auto kind = n % 3 == 1 ? nn::OutputKind::noisy : nn::OutputKind::bootstrapped;
    auto spec = arld::testing::random_spec(rng, kind);
    if (n % 3 == 0) spec.heads = 1;
    if (n % 3 == 2) spec.heads = std::max<std::size_t>(spec.heads, 2);
    auto net = arld::testing::random_network(rng, spec);
    auto state = random_vector(rng, spec.input_dim, -2.0, 2.0);
    while (arld::testing::near_kink(net, state)) state = random_vector(rng, spec.input_dim, -2.0, 2.0);

    arld::testing::LinearProbe probe;
    const auto noise = nn::sample_noise(rng, net.feature_dim(), spec.num_actions);
    if (kind == nn::OutputKind::noisy) {
      probe.outputs.push_back(std::cref(noise));
    } else {
      for (std::size_t k = 0; k < spec.heads; ++k) probe.outputs.push_back(nn::Head{k});
    }
    std::vector<nn::OutputGradient> grads_in;
    for (const auto& out : probe.outputs) {
      probe.coeffs.push_back(random_vector(rng, spec.num_actions));
      grads_in.push_back({out, probe.coeffs.back()});
    }
    auto grads = net.zeros_like();
    nn::backward(net, nn::trace_trunk(net, state), grads_in, grads);

    auto params = net.parameters();
    auto gparams = grads.parameters();
    for (std::size_t p = 0; p < params.size(); ++p) {
      for (std::size_t i = 0; i < params[p]->size(); ++i) {
        const double fd = arld::testing::central_difference(
            [&] { return probe.value(net, state); }, (*params[p])[i]);
        worst = std::max(worst, arld::testing::relative_error((*gparams[p])[i], fd));
        ++partials;
      }
    }
  }
  return {worst <= 1e-4, fmt("50 nets, %.0f partials, max rel err %.2e (tol 1e-4)", partials, worst)};
}

// 2 -------------------------------------------------------------------------

Outcome divergence_bounds() {
  using uncertainty::js_divergence;
  using uncertainty::softmax_policy;
  Rng rng(202);
  std::size_t violations = 0;
  for (int i = 0; i < 100000; ++i) {
    const std::size_t k = uniform_int(rng, 2, 10);
    const std::size_t n = uniform_int(rng, 2, 6);
    const double scale = uniform(rng, 0.01, 20.0);
    std::vector<std::vector<double>> policies;
    for (std::size_t h = 0; h < k; ++h) policies.push_back(softmax_policy(random_vector(rng, n, -scale, scale)));
    const double u = js_divergence(policies).value;
    if (!(u >= 0.0 && u <= std::log(static_cast<double>(k)))) ++violations;
  }
  const auto policies_of = [](std::vector<std::vector<double>> qs) {
    std::vector<std::vector<double>> out;
    for (const auto& q : qs) out.push_back(softmax_policy(q));
    return out;
  };
  const double same = js_divergence(policies_of({{0.3, 1.2, -0.4}, {0.3, 1.2, -0.4}, {0.3, 1.2, -0.4}})).value;
  const double opposite = js_divergence(std::vector<std::vector<double>>{{1.0, 0.0}, {0.0, 1.0}}).value;
  const double wide = js_divergence(policies_of({{1.0, 0.0}, {0.0, 1.0}})).value;
  const double narrow = js_divergence(policies_of({{0.5, 0.4}, {0.4, 0.5}})).value;
  const bool pass = violations == 0 && std::abs(same) <= 1e-12 &&
                    std::abs(opposite - std::numbers::ln2) <= 1e-9 && wide > narrow;
  return {pass, fmt("1e5 inputs, %.0f bound violations; identical %.1e, opposite - ln2 %.1e, contrast %.4f vs %.5f",
                    violations, same, opposite - std::numbers::ln2, wide, narrow)};
}

// 3 -------------------------------------------------------------------------

Outcome variance_monte_carlo() {
  Rng rng(303);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int pair = 0; pair < 100; ++pair) {
    const std::size_t p = uniform_int(rng, 1, 8), q = uniform_int(rng, 2, 4);
    nn::NoisyLayer layer(p, q);
    for (auto& v : layer.mu_w.values()) v = uniform(rng, -1.0, 1.0);
    for (auto& v : layer.mu_b.values()) v = uniform(rng, -1.0, 1.0);
    for (auto& v : layer.sigma_w.values()) v = uniform(rng, 0.01, 0.8);
    for (auto& v : layer.sigma_b.values()) v = uniform(rng, 0.01, 0.8);
    const auto phi = random_vector(rng, p, 0.0, 2.0);
    const double analytic = uncertainty::predictive_variance(layer, phi).value;

    std::size_t best = 0;
    double best_mean = -INFINITY;
    for (std::size_t a = 0; a < q; ++a) {
      double m = layer.mu_b[a];
      for (std::size_t j = 0; j < p; ++j) m += layer.mu_w(a, j) * phi[j];
      if (m > best_mean) best_mean = m, best = a;
    }
    // Independent Gaussian noise on every weight and bias of the greedy row.
    const int n = 100000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      double v = layer.mu_b[best] + layer.sigma_b[best] * normal(rng);
      for (std::size_t j = 0; j < p; ++j) v += (layer.mu_w(best, j) + layer.sigma_w(best, j) * normal(rng)) * phi[j];
      s += v;
      s2 += v * v;
    }
    const double mean = s / n;
    const double empirical = (s2 - n * mean * mean) / (n - 1);
    worst = std::max(worst, std::abs(analytic - empirical) / empirical);
  }
  return {worst <= 0.02, fmt("100 pairs x 1e5 samples, max rel err %.4f (tol 0.02)", worst)};
}

// 4 -------------------------------------------------------------------------

Outcome query_oracle() {
  Rng rng(404);
  const std::vector<double> thresholds{0.0, 0.05, 0.1, 0.3, 0.5, 1.0};
  const std::vector<std::size_t> windows{1, 10, 500};
  std::size_t mismatches = 0, steps = 0;
  const int streams = 10000;
  for (int s = 0; s < streams; ++s) {
    const double t = thresholds[s % thresholds.size()];
    const std::size_t nr = windows[(s / thresholds.size()) % windows.size()];
    const std::size_t len = uniform_int(rng, nr / 2 + 1, nr + 100);
    // Half the streams draw from a coarse grid so that ties are common.
    const bool coarse = s % 2 == 0;
    std::vector<double> values;
    for (std::size_t i = 0; i < len; ++i) {
      values.push_back(coarse ? static_cast<double>(uniform_int(rng, 0, 8)) / 8.0 : uniform(rng, 0.0, 1.0));
    }
    const auto want = arld::testing::sort_based_decisions(values, t, nr);
    query::UncertaintyWindow window(nr);
    for (std::size_t i = 0; i < len; ++i) {
      if (query::should_query(window, values[i], t).query != want[i]) ++mismatches;
      ++steps;
    }
  }
  return {mismatches == 0, fmt("1e4 streams, %.0f decisions, %.0f mismatches", steps, mismatches)};
}

// 5 -------------------------------------------------------------------------

replay::Transition transition(double tag, bool demo) {
  replay::Transition t;
  t.state = {tag};
  t.next_state = {tag};
  t.reward = tag;
  t.is_demo = demo;
  t.mask = {1};
  return t;
}

Outcome sum_tree() {
  Rng rng(505);
  // Random set operations against a shadow array.
  const std::size_t n = 1000;
  auto tree = replay::make_sum_tree(n);
  std::vector<double> shadow(n, 0.0);
  for (int op = 0; op < 100000; ++op) {
    const auto i = uniform_int(rng, 0, n - 1);
    shadow[i] = uniform_int(rng, 0, 9) == 0 ? 0.0 : uniform(rng, 0.0, 10.0);
    tree.set(i, shadow[i]);
  }
  double total = 0.0;
  for (double v : shadow) total += v;
  const bool consistent = tree.consistent() && std::abs(tree.root() - total) <= 1e-9 * total;

  // Sampling frequencies of the buffer's stratified proportional sampler.
  replay::PrioritizedBuffer buf({16, 1.0, 1e-3, 1.0});
  std::vector<std::size_t> ids;
  for (int i = 0; i < 8; ++i) ids.push_back(buf.push(transition(i, false)));
  std::vector<double> td;
  for (int i = 0; i < 8; ++i) td.push_back(uniform(rng, 0.5, 4.0));
  buf.update_priorities(ids, td);
  std::vector<double> counts(8, 0.0);
  const int batch = 32, draws = 1000000;
  for (int r = 0; r < draws / batch; ++r) {
    for (const auto& e : buf.sample(batch, 0.4, rng)) counts[e.id] += 1.0;
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < 8; ++i) {
    const double expect = buf.priority(ids[i]) / buf.total_priority();
    worst = std::max(worst, std::abs(counts[i] / draws - expect) / expect);
  }

  // Demonstrations survive a flood of high-priority agent data.
  replay::PrioritizedBuffer flood({100, 0.6, 1e-3, 1.0});
  std::vector<std::size_t> demo_ids;
  for (int i = 0; i < 40; ++i) {
    demo_ids.push_back(flood.push(transition(1000 + i, true)));
    flood.push(transition(i, false));
  }
  for (int i = 0; i < 100000; ++i) {
    const auto id = flood.push(transition(-i, false));
    const std::vector<std::size_t> one{id};
    const std::vector<double> huge{1e6};
    flood.update_priorities(one, huge);
  }
  std::multiset<double> demo_rewards;
  for (std::size_t i = 0; i < flood.size(); ++i) {
    if (flood.at(i).is_demo) demo_rewards.insert(flood.at(i).reward);
  }
  bool permanent = flood.demo_count() == 40 && demo_rewards.size() == 40 && flood.tree_consistent();
  for (int i = 0; i < 40; ++i) permanent = permanent && demo_rewards.count(1000 + i) == 1;

  return {consistent && worst <= 0.01 && permanent,
          fmt("1e5 ops consistent=%.0f; 1e6 draws max rel dev %.4f (tol 0.01); demos kept %.0f/40",
              consistent, worst, static_cast<double>(demo_rewards.size()))};
}

// 6 -------------------------------------------------------------------------

Outcome margin_loss() {
  Rng rng(606);
  std::size_t negative = 0, wrong_zero_set = 0;
  for (int i = 0; i < 100000; ++i) {
    const std::size_t n = uniform_int(rng, 2, 6);
    auto q = random_vector(rng, n, -3.0, 3.0);
    const std::size_t a = uniform_int(rng, 0, n - 1);
    const double m = uniform_int(rng, 0, 4) == 0 ? 0.0 : uniform(rng, 0.0, 2.0);
    if (i % 4 == 0) {  // place the expert action exactly on or above the margin
      double best_other = -INFINITY;
      for (std::size_t b = 0; b < n; ++b) if (b != a) best_other = std::max(best_other, q[b]);
      q[a] = best_other + m + (i % 8 == 0 ? 0.0 : uniform(rng, 0.0, 1.0));
    }
    const double loss = agent::margin_loss(q, a, m);
    bool satisfied = true;
    for (std::size_t b = 0; b < n; ++b) {
      if (b != a && q[b] + m > q[a]) satisfied = false;
    }
    if (loss < 0.0) ++negative;
    if ((loss == 0.0) != satisfied) ++wrong_zero_set;
  }
  const std::vector<double> fixture{1.0, 0.5};
  const double f = agent::margin_loss(fixture, 0, 0.8);
  return {negative == 0 && wrong_zero_set == 0 && std::abs(f - 0.3) <= 1e-12,
          fmt("1e5 inputs: %.0f negative, %.0f zero-set mismatches; fixture %.15f", negative,
              wrong_zero_set, f)};
}

// 7 -------------------------------------------------------------------------

Outcome synthetic_mdp() {
  const std::vector<std::vector<std::size_t>> next{{0, 1}, {0, 1}};
  const std::vector<std::vector<double>> reward{{1.0, 0.0}, {0.0, 2.0}};
  const double gamma = 0.9;
  const auto q_star = arld::testing::value_iteration(next, reward, gamma);

  agent::AgentConfig cfg;
  cfg.gamma = gamma;
  cfg.learning_rate = 1e-3;
  cfg.batch_size = 4;
  cfg.target_update_period = 50;
  cfg.lambda_n_step = 0.0;
  cfg.lambda_margin = 0.0;
  cfg.lambda_l2 = 0.0;
  cfg.heads = 1;
  cfg.hidden = {16};
  agent::Agent learner(2, 2, cfg, 7);
  replay::PrioritizedBuffer buf({16, 0.6, 1e-3, 1.0});
  auto one_hot = [](std::size_t s) { return std::vector<double>{s == 0 ? 1.0 : 0.0, s == 1 ? 1.0 : 0.0}; };
  for (std::size_t s = 0; s < 2; ++s) {
    for (std::size_t a = 0; a < 2; ++a) {
      replay::Transition t;
      t.state = one_hot(s);
      t.action = a;
      t.reward = reward[s][a];
      t.next_state = one_hot(next[s][a]);
      t.mask = {1};
      buf.push(t);
    }
  }
  for (int i = 0; i < 30000; ++i) learner.train_step(buf, 1.0);
  double worst = 0.0;
  for (std::size_t s = 0; s < 2; ++s) {
    const auto q = learner.eval_q_values(one_hot(s));
    for (std::size_t a = 0; a < 2; ++a) worst = std::max(worst, std::abs(q[a] - q_star[s][a]));
  }
  return {worst <= 0.05, fmt("Q* = (%.2f, %.2f; %.2f, %.2f), ", q_star[0][0], q_star[0][1],
                             q_star[1][0], q_star[1][1]) +
                             fmt("max |Q - Q*| %.4f (tol 0.05)", worst)};
}

// 8 -------------------------------------------------------------------------

Outcome determinism() {
  using harness::Method;
  const auto weak = expert::ExpertPolicy::weak_checkpoint(arld::testing::balancing_network());
  const auto noisy = expert::ExpertPolicy::noisy(arld::testing::balancing_network(), 0.4);
  std::size_t pairs = 0, differing = 0;
  for (auto m : {Method::dqn, Method::dqfd, Method::gdqn, Method::bdqn, Method::adqn, Method::adqnp}) {
    for (auto v : {nn::OutputKind::bootstrapped, nn::OutputKind::noisy}) {
      auto c = arld::testing::tiny_config(m, v);
      if (m == Method::bdqn) c.bernoulli_probability = 0.05;
      for (const auto* e : {&weak, &noisy}) {
        const std::uint64_t seed = 31 + pairs;
        if (!(harness::run_trial(c, seed, e) == harness::run_trial(c, seed, e))) ++differing;
        ++pairs;
      }
    }
  }
  return {differing == 0, fmt("%.0f (config, seed) pairs run twice, %.0f differ", pairs, differing)};
}

// 9-12 ----------------------------------------------------------------------

struct Reproduction {
  std::vector<harness::RunRecord> dqn, adqn;
  harness::Summary dqn_summary, adqn_summary;
  double expert_mean = 0.0;
  std::string expert_error;
  std::vector<harness::RunRecord> accounting;  // additional methods
};

std::vector<harness::RunRecord> run_seeds(const harness::ExperimentConfig& c, std::size_t seeds,
                                          const expert::ExpertPolicy* expert, const char* label) {
  std::vector<harness::RunRecord> out;
  for (std::size_t s = 0; s < seeds; ++s) {
    out.push_back(harness::run_trial(c, s, expert));
    const auto& r = out.back();
    std::fprintf(stderr, "  [%s seed %zu] %s, final %.2f%s\n", label, s,
                 r.steps_to_solve ? ("solved at " + std::to_string(*r.steps_to_solve)).c_str() : "unsolved",
                 r.final_score(), r.aborted ? (" ABORTED: " + r.error).c_str() : "");
  }
  return out;
}

Reproduction reproduce(std::size_t seeds) {
  using harness::Method;
  const auto task = envs::Task::cart_pole;
  const auto boot = nn::OutputKind::bootstrapped;
  Reproduction rep;

  const auto dqn_cfg = harness::preset(task, Method::dqn, boot);
  rep.dqn = run_seeds(dqn_cfg, seeds, nullptr, "DQN-B");
  rep.dqn_summary = harness::aggregate(rep.dqn, dqn_cfg.training_steps);

  std::optional<expert::ExpertPolicy> weak;
  try {
    auto build = harness::make_weak_expert(task, boot, 1000, 250, harness::default_selection_rule(task));
    weak = build.selection.expert;
    rep.expert_mean = weak->stats()->mean;
    std::fprintf(stderr, "  weak expert: checkpoint step %zu, mean %.2f +- %.2f\n",
                 build.checkpoints[build.selection.index].step, weak->stats()->mean, weak->stats()->std);
  } catch (const std::exception& e) {
    rep.expert_error = e.what();
    return rep;
  }

  const auto adqn_cfg = harness::preset(task, Method::adqn, boot);
  rep.adqn = run_seeds(adqn_cfg, seeds, &*weak, "ADQN-B");
  rep.adqn_summary = harness::aggregate(rep.adqn, adqn_cfg.training_steps);

  for (auto m : {Method::dqfd, Method::gdqn, Method::bdqn, Method::adqnp}) {
    const auto c = harness::preset(task, m, boot);
    const auto label = harness::method_label(m, boot);
    for (auto& r : run_seeds(c, 3, &*weak, label.c_str())) rep.accounting.push_back(std::move(r));
  }
  // Noisy variants with shortened training.
  for (auto m : {Method::gdqn, Method::bdqn, Method::adqn, Method::adqnp}) {
    auto c = arld::testing::tiny_config(m, nn::OutputKind::noisy);
    c.training_steps = 2000;
    c.eval_period = 1000;
    for (std::uint64_t s = 0; s < 3; ++s) rep.accounting.push_back(harness::run_trial(c, s, &*weak));
  }
  return rep;
}

Outcome dqn_band(const Reproduction& rep) {
  const double m = rep.dqn_summary.median_steps_to_solve;
  return {m <= 16000.0, fmt("DQN-B median steps_to_solve %.0f over %.0f seeds (%.0f solved), bound 16000", m,
                            rep.dqn.size(), rep.dqn_summary.solved)};
}

Outcome ordering(const Reproduction& rep) {
  if (!rep.expert_error.empty()) return {false, "weak expert unavailable: " + rep.expert_error};
  const double a = rep.adqn_summary.median_steps_to_solve, d = rep.dqn_summary.median_steps_to_solve;
  return {a <= d, fmt("ADQN-B median %.0f vs DQN-B median %.0f (%.0f/%.0f solved)", a, d,
                      rep.adqn_summary.solved, rep.adqn.size())};
}

Outcome super_expert(const Reproduction& rep) {
  if (!rep.expert_error.empty()) return {false, "weak expert unavailable: " + rep.expert_error};
  std::vector<double> finals;
  for (const auto& r : rep.adqn) finals.push_back(r.final_score());
  const double m = harness::median(finals);
  return {m >= 195.0 && m > rep.expert_mean,
          fmt("ADQN-B final median score %.2f (>= 195), weak expert mean %.2f", m, rep.expert_mean)};
}

Outcome accounting(const Reproduction& rep) {
  if (!rep.expert_error.empty()) return {false, "weak expert unavailable: " + rep.expert_error};
  const std::size_t adqn_budget = harness::preset(envs::Task::cart_pole, harness::Method::adqn,
                                                  nn::OutputKind::bootstrapped).budget;
  std::size_t checked = 0, over_budget = 0, adqnp_runs = 0, adqnp_mismatch = 0, aborted = 0;
  auto check = [&](const harness::RunRecord& r) {
    ++checked;
    if (r.aborted) ++aborted;
    if (r.charged_demos > r.online_budget) ++over_budget;
    if (r.label.starts_with("ADQNP") && r.label.ends_with("-B")) {
      ++adqnp_runs;
      if (r.total_demonstrations() != adqn_budget) ++adqnp_mismatch;
    }
  };
  for (const auto& r : rep.dqn) check(r);
  for (const auto& r : rep.adqn) check(r);
  for (const auto& r : rep.accounting) check(r);
  const bool pass = checked > 0 && over_budget == 0 && adqnp_mismatch == 0 && adqnp_runs > 0 && aborted == 0;
  return {pass, fmt("%.0f runs: %.0f over budget, %.0f aborted; ADQNP-B total == %.0f in ", checked,
                    over_budget, aborted, adqn_budget) +
                    fmt("%.0f/%.0f runs", adqnp_runs - adqnp_mismatch, adqnp_runs)};
}

// 13 ------------------------------------------------------------------------

Outcome acrobot_study(std::size_t seeds) {
  using harness::Method;
  const auto task = envs::Task::acrobot;
  const auto boot = nn::OutputKind::bootstrapped;
  auto build = harness::make_weak_expert(task, boot, 1000, 2500, harness::default_selection_rule(task));
  const auto& weak = build.selection.expert;
  std::map<std::string, double> med;
  for (auto m : {Method::adqn, Method::bdqn, Method::dqn}) {
    const auto c = harness::preset(task, m, boot);
    const auto records = run_seeds(c, seeds, &weak, harness::method_label(m, boot).c_str());
    med[std::string(harness::method_name(m))] = harness::aggregate(records, c.training_steps).clamped_median_steps_to_solve;
  }
  double lo = INFINITY, hi = 0.0;
  for (double t : {0.05, 0.1, 0.3, 0.5}) {
    auto c = harness::preset(task, Method::adqn, boot);
    c.query.t_query = t;
    const auto records = run_seeds(c, seeds, &weak, "ADQN-B sweep");
    const double m = harness::aggregate(records, c.training_steps).clamped_median_steps_to_solve;
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  const bool order = med["ADQN"] < med["BDQN"] && med["BDQN"] < med["DQN"];
  return {order && hi <= 2.0 * lo, fmt("medians ADQN %.0f, BDQN %.0f, DQN %.0f; ", med["ADQN"], med["BDQN"],
                                       med["DQN"]) +
                                       fmt("t_query sweep spread %.2fx (<= 2)", hi / lo)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  bool extended = false;
  std::size_t seeds = 20, extended_seeds = 10;
  std::vector<int> only;
  app.add_flag("--extended", extended, "also run the multi-hour Acrobot study");
  app.add_option("--seeds", seeds, "seeds for the Cart-Pole reproduction");
  app.add_option("--extended-seeds", extended_seeds, "seeds for the Acrobot study")->check(CLI::Range(10, 1000));
  app.add_option("--only", only, "run only these criteria");
  CLI11_PARSE(app, argc, argv);

  auto selected = [&](int n) { return only.empty() || std::find(only.begin(), only.end(), n) != only.end(); };
  int failures = 0;
  auto report = [&](int n, const Outcome& o, double seconds) {
    std::printf("[%s] %2d  %s  (%.1fs)\n", o.pass ? "PASS" : "FAIL", n, o.detail.c_str(), seconds);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  };
  auto timed = [&](int n, const std::function<Outcome()>& f) {
    if (!selected(n)) return;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    report(n, o, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  };

  timed(1, gradient_check);
  timed(2, divergence_bounds);
  timed(3, variance_monte_carlo);
  timed(4, query_oracle);
  timed(5, sum_tree);
  timed(6, margin_loss);
  timed(7, synthetic_mdp);
  timed(8, determinism);

  if (selected(9) || selected(10) || selected(11) || selected(12)) {
    const auto start = std::chrono::steady_clock::now();
    const auto rep = reproduce(seeds);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (selected(9)) report(9, dqn_band(rep), seconds);
    if (selected(10)) report(10, ordering(rep), 0.0);
    if (selected(11)) report(11, super_expert(rep), 0.0);
    if (selected(12)) report(12, accounting(rep), 0.0);
  }

  if (selected(13)) {
    if (extended) {
      timed(13, [&] { return acrobot_study(extended_seeds); });
    } else {
      std::printf("[SKIP] 13  extended Acrobot study (pass --extended to run)\n");
    }
  }
  return failures == 0 ? 0 : 1;
}
