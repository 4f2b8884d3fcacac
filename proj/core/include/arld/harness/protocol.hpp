#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "arld/envs/environment.hpp"
#include "arld/expert/human_channel.hpp"

namespace arld::harness {

// Expert-bridge wire protocol. Every frame is the decimal byte length of a
// UTF-8 JSON payload, a newline, then the payload:
//
//   27\n{"type":"action",...}
//
// Server -> client payloads (all carry "type"):
//   query        {run_id, step, task, render_state{...}, q_values[], uncertainty,
//                 budget_left, deadline}     deadline: Unix epoch milliseconds
//   confirm      {step, action_id, budget_left}
//   state_stream {step, task, render_state{...}}
//   curve_point  {step, score}
//   error        {message}
// Client -> server:
//   action       {step, action_id}
// Unknown fields are ignored.

inline constexpr std::size_t kMaxFrameBytes = 1 << 20;

std::string encode_frame(std::string_view payload);

/// Incremental parser for a byte stream of frames.
class FrameDecoder {
 public:
  void feed(std::string_view bytes);
  /// Next complete payload, if any. After a malformed header the decoder is
  /// in the failed state and yields nothing further.
  std::optional<std::string> next();
  bool failed() const noexcept { return failed_; }
  const std::string& failure() const noexcept { return failure_; }

 private:
  std::string buffer_;
  bool failed_ = false;
  std::string failure_;
};

struct ActionMessage {
  std::size_t step = 0;
  std::size_t action_id = 0;
};

/// Parses a client payload; a std::string alternative carries the reason the
/// payload was rejected.
std::variant<ActionMessage, std::string> parse_client_message(std::string_view payload);

std::string query_payload(const expert::QueryRequest& request);
std::string confirm_payload(std::size_t step, std::size_t action_id, std::size_t budget_left);
std::string state_stream_payload(std::size_t step, std::string_view task,
                                 const envs::RenderState& render_state);
std::string curve_point_payload(std::size_t step, double score);
std::string error_payload(std::string_view message);
std::string action_payload(std::size_t step, std::size_t action_id);

}  // namespace arld::harness
