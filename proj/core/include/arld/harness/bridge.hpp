#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "arld/envs/environment.hpp"
#include "arld/expert/human_channel.hpp"

namespace arld::harness {

/// TCP endpoint speaking the expert-bridge protocol to one console client at a
/// time. Pending requests on the channel are sent as query frames; action
/// frames from the client answer them. A newer connection replaces the
/// current one.
class ExpertBridge {
 public:
  /// port 0 binds an ephemeral port.
  ExpertBridge(std::shared_ptr<expert::HumanExpertChannel> channel, std::uint16_t port = 0,
               std::string bind_address = "127.0.0.1");
  ~ExpertBridge();
  ExpertBridge(const ExpertBridge&) = delete;
  ExpertBridge& operator=(const ExpertBridge&) = delete;

  std::uint16_t port() const noexcept { return port_; }
  bool client_connected() const noexcept { return client_fd_.load() >= 0; }

  void publish_confirmation(std::size_t step, std::size_t action_id, std::size_t budget_left);
  void publish_curve_point(std::size_t step, double score);
  void publish_state(std::size_t step, std::string_view task, const envs::RenderState& state);

  void stop();

 private:
  void run();
  void enqueue(std::string payload);
  void handle_payload(int fd, const std::string& payload);
  bool send_all(int fd, const std::string& bytes);

  std::shared_ptr<expert::HumanExpertChannel> channel_;
  int listen_fd_ = -1;
  std::atomic<int> client_fd_{-1};
  std::uint16_t port_ = 0;
  std::atomic<bool> running_{true};
  std::mutex outbox_mutex_;
  std::deque<std::string> outbox_;
  std::thread worker_;
};

}  // namespace arld::harness
