#include "arld/harness/protocol.hpp"

#include <charconv>

#include "json.hpp"

namespace arld::harness {

using nlohmann::json;

namespace {

json render_json(const envs::RenderState& state) {
  json out = json::object();
  for (const auto& [name, value] : state) out[name] = value;
  return out;
}

}  // namespace

std::string encode_frame(std::string_view payload) {
  std::string frame = std::to_string(payload.size());
  frame += '\n';
  frame += payload;
  return frame;
}

void FrameDecoder::feed(std::string_view bytes) {
  if (!failed_) buffer_.append(bytes);
}

std::optional<std::string> FrameDecoder::next() {
  if (failed_) return std::nullopt;
  const auto newline = buffer_.find('\n');
  if (newline == std::string::npos) {
    if (buffer_.size() > 20) {
      failed_ = true;
      failure_ = "frame header too long";
    }
    return std::nullopt;
  }
  std::size_t length = 0;
  const char* begin = buffer_.data();
  const auto [ptr, ec] = std::from_chars(begin, begin + newline, length);
  if (newline == 0 || ec != std::errc() || ptr != begin + newline) {
    failed_ = true;
    failure_ = "malformed frame header";
    return std::nullopt;
  }
  if (length > kMaxFrameBytes) {
    failed_ = true;
    failure_ = "frame too large";
    return std::nullopt;
  }
  if (buffer_.size() - newline - 1 < length) return std::nullopt;
  std::string payload = buffer_.substr(newline + 1, length);
  buffer_.erase(0, newline + 1 + length);
  return payload;
}

std::variant<ActionMessage, std::string> parse_client_message(std::string_view payload) {
  const json msg = json::parse(payload, nullptr, false);
  if (msg.is_discarded()) return std::string("payload is not valid JSON");
  if (!msg.is_object()) return std::string("payload must be a JSON object");
  const auto type = msg.find("type");
  if (type == msg.end() || !type->is_string()) return std::string("missing message type");
  if (*type != "action") return "unsupported message type '" + type->get<std::string>() + "'";
  const auto step = msg.find("step");
  const auto action = msg.find("action_id");
  if (step == msg.end() || !step->is_number_unsigned()) {
    return std::string("action.step must be a non-negative integer");
  }
  if (action == msg.end() || !action->is_number_unsigned()) {
    return std::string("action.action_id must be a non-negative integer");
  }
  return ActionMessage{step->get<std::size_t>(), action->get<std::size_t>()};
}

std::string query_payload(const expert::QueryRequest& r) {
  return json{{"type", "query"},
              {"run_id", r.run_id},
              {"step", r.step},
              {"task", r.task},
              {"render_state", render_json(r.render_state)},
              {"q_values", r.q_values},
              {"uncertainty", r.uncertainty},
              {"budget_left", r.budget_left},
              {"deadline", r.deadline_ms}}
      .dump();
}

std::string confirm_payload(std::size_t step, std::size_t action_id, std::size_t budget_left) {
  return json{{"type", "confirm"},
              {"step", step},
              {"action_id", action_id},
              {"budget_left", budget_left}}
      .dump();
}

std::string state_stream_payload(std::size_t step, std::string_view task,
                                 const envs::RenderState& render_state) {
  return json{{"type", "state_stream"},
              {"step", step},
              {"task", task},
              {"render_state", render_json(render_state)}}
      .dump();
}

std::string curve_point_payload(std::size_t step, double score) {
  return json{{"type", "curve_point"}, {"step", step}, {"score", score}}.dump();
}

std::string error_payload(std::string_view message) {
  return json{{"type", "error"}, {"message", message}}.dump();
}

std::string action_payload(std::size_t step, std::size_t action_id) {
  return json{{"type", "action"}, {"step", step}, {"action_id", action_id}}.dump();
}

}  // namespace arld::harness
