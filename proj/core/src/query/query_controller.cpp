#include "arld/query/query_controller.hpp"

#include <algorithm>

#include "arld/error.hpp"

namespace arld::query {

std::string_view criterion_name(QueryCriterion criterion) {
  switch (criterion) {
    case QueryCriterion::none: return "none";
    case QueryCriterion::greedy: return "greedy";
    case QueryCriterion::bernoulli: return "bernoulli";
    case QueryCriterion::uncertainty: return "uncertainty";
  }
  return "unknown";
}

QueryController::QueryController(QueryCriterion criterion, QueryConfig config,
                                 double bernoulli_probability)
    : criterion_(criterion),
      config_(config),
      bernoulli_probability_(bernoulli_probability),
      window_(std::max<std::size_t>(config.window_size, 1)),
      budget_(criterion == QueryCriterion::none ? 0 : config.budget) {
  require(config.session_len >= 1, "query: session length must be positive");
  require(bernoulli_probability >= 0.0 && bernoulli_probability <= 1.0,
          "query: Bernoulli probability must lie in [0, 1]");
}

StepPlan QueryController::plan_step(std::optional<double> uncertainty, Rng& rng) {
  StepPlan plan;
  if (budget_ == 0) return plan;
  if (criterion_ == QueryCriterion::uncertainty)
    require(uncertainty.has_value(), "query: uncertainty required by the adaptive criterion");

  if (in_session()) {
    if (uncertainty && criterion_ == QueryCriterion::uncertainty) window_.insert(*uncertainty);
    plan.expert = true;
    return plan;
  }

  bool fire = false;
  switch (criterion_) {
    case QueryCriterion::none: return plan;
    case QueryCriterion::greedy: fire = true; break;
    case QueryCriterion::bernoulli: fire = uniform01(rng) < bernoulli_probability_; break;
    case QueryCriterion::uncertainty: {
      const auto decision = should_query(window_, *uncertainty, config_.t_query);
      fire = decision.query;
      plan.threshold = decision.threshold;
      break;
    }
  }
  plan.consulted = true;
  if (fire) {
    session_left_ = std::min(config_.session_len, budget_);
    plan.expert = true;
    plan.query_fired = true;
  }
  return plan;
}

void QueryController::charge_demo_step() {
  require(budget_ > 0 && session_left_ > 0, "query: no open demonstration session to charge");
  --budget_;
  --session_left_;
  ++charged_;
  if (budget_ == 0) session_left_ = 0;
}

}  // namespace arld::query
