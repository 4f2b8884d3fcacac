#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "arld/harness/trial.hpp"

namespace arld::harness {

struct Summary {
  std::vector<std::size_t> steps;
  std::vector<double> median_curve;
  /// Unsolved trials count as +infinity.
  double median_steps_to_solve = 0.0;
  /// Unsolved trials count as the training horizon.
  double clamped_median_steps_to_solve = 0.0;
  std::size_t solved = 0;
  std::size_t trials = 0;
};

/// Median of a non-empty sample (mean of the middle pair for even sizes).
double median(std::vector<double> values);

Summary aggregate(std::span<const RunRecord> records, std::size_t horizon);

}  // namespace arld::harness
