#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "arld/query/uncertainty_window.hpp"
#include "arld/random.hpp"

namespace arld::query {

enum class QueryCriterion { none, greedy, bernoulli, uncertainty };

std::string_view criterion_name(QueryCriterion criterion);

struct QueryConfig {
  double t_query = 0.1;
  std::size_t window_size = 500;  // N_r
  std::size_t budget = 0;         // expert steps available
  std::size_t session_len = 5;    // consecutive expert steps per query

  friend bool operator==(const QueryConfig&, const QueryConfig&) = default;
};

struct StepPlan {
  bool expert = false;       // the expert should act this step
  bool query_fired = false;  // a new demonstration session starts here
  bool consulted = false;    // the query criterion was evaluated
  std::optional<double> threshold;
};

/// Decides, step by step, whether the expert acts. A fired query opens a
/// session of up to session_len expert steps; each demonstrated step is
/// charged against the budget. No new query is considered mid-session, but
/// uncertainties observed there still enter the window.
class QueryController {
 public:
  QueryController(QueryCriterion criterion, QueryConfig config,
                  double bernoulli_probability = 0.0);

  QueryCriterion criterion() const noexcept { return criterion_; }
  const QueryConfig& config() const noexcept { return config_; }
  std::size_t budget_left() const noexcept { return budget_; }
  std::size_t charged() const noexcept { return charged_; }
  bool in_session() const noexcept { return session_left_ > 0; }
  bool needs_uncertainty() const noexcept {
    return criterion_ == QueryCriterion::uncertainty && budget_ > 0;
  }
  const UncertaintyWindow& window() const noexcept { return window_; }

  /// `uncertainty` must be provided whenever needs_uncertainty() is true.
  StepPlan plan_step(std::optional<double> uncertainty, Rng& rng);
  /// The expert supplied this step's action.
  void charge_demo_step();
  /// The expert did not answer (timeout): end the session, charge nothing.
  void abandon_session() noexcept { session_left_ = 0; }
  void end_episode() noexcept { session_left_ = 0; }

 private:
  QueryCriterion criterion_;
  QueryConfig config_;
  double bernoulli_probability_;
  UncertaintyWindow window_;
  std::size_t budget_;
  std::size_t charged_ = 0;
  std::size_t session_left_ = 0;
};

}  // namespace arld::query
