#pragma once

#include <cstddef>
#include <deque>
#include <vector>

#include "arld/replay/transition.hpp"

namespace arld::replay {

/// Delays transitions of one episode until their N-step lookahead is known.
class NStepAccumulator {
 public:
  NStepAccumulator(std::size_t n, double gamma);

  /// Adds the next transition of the episode; returns those now complete.
  std::vector<Transition> push(Transition t);
  /// Completes every pending transition at the end of an episode (terminal
  /// or truncated) and clears the window.
  std::vector<Transition> flush();

 private:
  Transition complete(std::size_t index) const;

  std::size_t n_;
  double gamma_;
  std::deque<Transition> window_;
};

}  // namespace arld::replay
