#include "arld/expert/human_channel.hpp"

namespace arld::expert {

std::optional<std::size_t> HumanExpertChannel::ask(QueryRequest request,
                                                   std::chrono::milliseconds timeout) {
  std::unique_lock lock(mutex_);
  if (closed_) return std::nullopt;
  pending_ = std::move(request);
  answer_.reset();
  ++sequence_;
  changed_.notify_all();
  changed_.wait_for(lock, timeout, [this] { return answer_.has_value() || closed_; });
  auto result = answer_;
  pending_.reset();
  answer_.reset();
  changed_.notify_all();
  return result;
}

std::optional<QueryRequest> HumanExpertChannel::pending() const {
  std::lock_guard lock(mutex_);
  return pending_;
}

std::optional<std::pair<std::uint64_t, QueryRequest>> HumanExpertChannel::wait_for_request(
    std::uint64_t after, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mutex_);
  changed_.wait_for(lock, timeout,
                    [&] { return closed_ || (pending_.has_value() && sequence_ > after); });
  if (pending_ && sequence_ > after) return std::make_pair(sequence_, *pending_);
  return std::nullopt;
}

bool HumanExpertChannel::answer(std::size_t step, std::size_t action) {
  std::lock_guard lock(mutex_);
  if (!pending_ || pending_->step != step || answer_) return false;
  answer_ = action;
  changed_.notify_all();
  return true;
}

void HumanExpertChannel::close() {
  std::lock_guard lock(mutex_);
  closed_ = true;
  changed_.notify_all();
}

bool HumanExpertChannel::closed() const {
  std::lock_guard lock(mutex_);
  return closed_;
}

}  // namespace arld::expert
