#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "arld/envs/environment.hpp"

namespace arld::expert {

/// What a human expert is shown when the agent asks for an action.
struct QueryRequest {
  std::string run_id;
  std::size_t step = 0;
  std::string task;
  envs::RenderState render_state;
  std::vector<double> q_values;
  double uncertainty = 0.0;
  std::size_t budget_left = 0;
  std::int64_t deadline_ms = 0;  // Unix epoch milliseconds
};

/// Single-outstanding-request rendezvous between the training thread (which
/// asks and blocks) and a transport such as the expert bridge (which answers).
class HumanExpertChannel {
 public:
  /// Blocks until answered or `timeout` elapses; nullopt on timeout or close.
  std::optional<std::size_t> ask(QueryRequest request, std::chrono::milliseconds timeout);

  /// The request currently awaiting an answer, if any.
  std::optional<QueryRequest> pending() const;
  /// Waits up to `timeout` for a pending request with a sequence number
  /// greater than `after`; returns it with its sequence number.
  std::optional<std::pair<std::uint64_t, QueryRequest>> wait_for_request(
      std::uint64_t after, std::chrono::milliseconds timeout) const;

  /// Delivers an action for the pending request with this step. Returns false
  /// if nothing is pending for that step.
  bool answer(std::size_t step, std::size_t action);

  /// Releases any waiter and makes future asks time out immediately.
  void close();
  bool closed() const;

 private:
  mutable std::mutex mutex_;
  mutable std::condition_variable changed_;
  std::optional<QueryRequest> pending_;
  std::optional<std::size_t> answer_;
  std::uint64_t sequence_ = 0;
  bool closed_ = false;
};

}  // namespace arld::expert
