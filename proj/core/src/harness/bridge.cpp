#include "arld/harness/bridge.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>
#include <variant>

#include "arld/harness/protocol.hpp"

namespace arld::harness {

namespace {

constexpr int kPollMs = 10;

[[noreturn]] void fail(const std::string& what) {
  throw std::runtime_error(what + ": " + std::strerror(errno));
}

}  // namespace

ExpertBridge::ExpertBridge(std::shared_ptr<expert::HumanExpertChannel> channel,
                           std::uint16_t port, std::string bind_address)
    : channel_(std::move(channel)) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) fail("bridge socket");
  const int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, bind_address.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    throw std::invalid_argument("bridge: bad bind address " + bind_address);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 ||
      ::listen(listen_fd_, 4) < 0) {
    const int err = errno;
    ::close(listen_fd_);
    errno = err;
    fail("bridge bind");
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  worker_ = std::thread([this] { run(); });
}

ExpertBridge::~ExpertBridge() { stop(); }

void ExpertBridge::stop() {
  if (!running_.exchange(false)) return;
  if (worker_.joinable()) worker_.join();
  if (const int fd = client_fd_.exchange(-1); fd >= 0) ::close(fd);
  if (listen_fd_ >= 0) ::close(listen_fd_);
  listen_fd_ = -1;
}

void ExpertBridge::publish_confirmation(std::size_t step, std::size_t action_id,
                                        std::size_t budget_left) {
  enqueue(confirm_payload(step, action_id, budget_left));
}

void ExpertBridge::publish_curve_point(std::size_t step, double score) {
  enqueue(curve_point_payload(step, score));
}

void ExpertBridge::publish_state(std::size_t step, std::string_view task,
                                 const envs::RenderState& state) {
  enqueue(state_stream_payload(step, task, state));
}

void ExpertBridge::enqueue(std::string payload) {
  if (!client_connected()) return;
  std::lock_guard lock(outbox_mutex_);
  outbox_.push_back(std::move(payload));
}

bool ExpertBridge::send_all(int fd, const std::string& bytes) {
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    const auto n = ::send(fd, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

void ExpertBridge::handle_payload(int fd, const std::string& payload) {
  const auto parsed = parse_client_message(payload);
  if (const auto* reason = std::get_if<std::string>(&parsed)) {
    send_all(fd, encode_frame(error_payload(*reason)));
    return;
  }
  const auto& msg = std::get<ActionMessage>(parsed);
  const auto pending = channel_->pending();
  if (!pending || pending->step != msg.step) {
    send_all(fd, encode_frame(error_payload("no pending query for step " +
                                            std::to_string(msg.step))));
    return;
  }
  if (!pending->q_values.empty() && msg.action_id >= pending->q_values.size()) {
    send_all(fd, encode_frame(error_payload("action_id out of range")));
    return;
  }
  if (!channel_->answer(msg.step, msg.action_id)) {
    send_all(fd, encode_frame(error_payload("query expired")));
  }
}

void ExpertBridge::run() {
  FrameDecoder decoder;
  std::uint64_t last_sent = 0;
  char buf[4096];

  auto drop_client = [&] {
    if (const int fd = client_fd_.exchange(-1); fd >= 0) ::close(fd);
    std::lock_guard lock(outbox_mutex_);
    outbox_.clear();
  };

  while (running_) {
    pollfd fds[2];
    nfds_t count = 0;
    fds[count++] = {listen_fd_, POLLIN, 0};
    const int client = client_fd_.load();
    if (client >= 0) fds[count++] = {client, POLLIN, 0};
    const int ready = ::poll(fds, count, kPollMs);
    if (ready < 0 && errno != EINTR) break;

    if (ready > 0 && (fds[0].revents & POLLIN)) {
      const int fd = ::accept(listen_fd_, nullptr, nullptr);
      if (fd >= 0) {
        drop_client();
        decoder = FrameDecoder{};
        client_fd_ = fd;
        // A newly connected console is shown the outstanding query.
        if (auto pending = channel_->wait_for_request(0, std::chrono::milliseconds(0))) {
          last_sent = pending->first;
          send_all(fd, encode_frame(query_payload(pending->second)));
        }
      }
    }

    if (client >= 0 && count > 1 && ready > 0 &&
        (fds[1].revents & (POLLIN | POLLHUP | POLLERR))) {
      const auto n = ::recv(client, buf, sizeof buf, 0);
      if (n <= 0) {
        drop_client();
        continue;
      }
      decoder.feed(std::string_view(buf, static_cast<std::size_t>(n)));
      while (auto payload = decoder.next()) handle_payload(client, *payload);
      if (decoder.failed()) {
        send_all(client, encode_frame(error_payload(decoder.failure())));
        drop_client();
        continue;
      }
    }

    const int fd = client_fd_.load();
    if (fd < 0) continue;
    std::deque<std::string> outgoing;
    {
      std::lock_guard lock(outbox_mutex_);
      outgoing.swap(outbox_);
    }
    bool ok = true;
    for (const auto& payload : outgoing) {
      if (!(ok = send_all(fd, encode_frame(payload)))) break;
    }
    if (ok) {
      if (auto pending = channel_->wait_for_request(last_sent, std::chrono::milliseconds(0))) {
        last_sent = pending->first;
        ok = send_all(fd, encode_frame(query_payload(pending->second)));
      }
    }
    if (!ok) drop_client();
  }
}

}  // namespace arld::harness
