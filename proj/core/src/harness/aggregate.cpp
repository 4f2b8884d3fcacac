#include "arld/harness/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "arld/error.hpp"

namespace arld::harness {

double median(std::vector<double> values) {
  require(!values.empty(), "median of an empty sample");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  if (std::isinf(upper) && std::isinf(lower)) return upper;
  return 0.5 * (lower + upper);
}

Summary aggregate(std::span<const RunRecord> records, std::size_t horizon) {
  require(!records.empty(), "aggregate needs at least one record");
  Summary summary;
  summary.trials = records.size();

  std::map<std::size_t, std::vector<double>> by_step;
  for (const auto& r : records) {
    for (const auto& p : r.curve) by_step[p.step].push_back(p.mean_score);
  }
  for (auto& [step, scores] : by_step) {
    summary.steps.push_back(step);
    summary.median_curve.push_back(median(std::move(scores)));
  }

  std::vector<double> solve, clamped;
  for (const auto& r : records) {
    if (r.steps_to_solve) {
      ++summary.solved;
      solve.push_back(static_cast<double>(*r.steps_to_solve));
      clamped.push_back(static_cast<double>(*r.steps_to_solve));
    } else {
      solve.push_back(std::numeric_limits<double>::infinity());
      clamped.push_back(static_cast<double>(horizon));
    }
  }
  summary.median_steps_to_solve = median(std::move(solve));
  summary.clamped_median_steps_to_solve = median(std::move(clamped));
  return summary;
}

}  // namespace arld::harness
