#include "arld/replay/prioritized_buffer.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "arld/error.hpp"
#include "arld/nn/checkpoint.hpp"

namespace arld::replay {

PrioritizedBuffer::PrioritizedBuffer(ReplayOptions options)
    : options_(options),
      sum_(make_sum_tree(std::max<std::size_t>(options.capacity, 1))),
      min_(make_min_tree(std::max<std::size_t>(options.capacity, 1))),
      max_(make_max_tree(std::max<std::size_t>(options.capacity, 1))) {
  require(options.capacity >= 1, "replay: capacity must be positive");
  require(options.alpha >= 0.0, "replay: alpha must be non-negative");
  require(options.eps_agent > 0.0, "replay: eps_agent must be positive");
  require(options.eps_demo >= 0.0, "replay: eps_demo must be non-negative");
  entries_.reserve(options.capacity);
  priorities_.reserve(options.capacity);
}

void PrioritizedBuffer::set_priority(std::size_t id, double priority) {
  priorities_[id] = priority;
  const double scaled = std::pow(priority, options_.alpha);
  sum_.set(id, scaled);
  min_.set(id, scaled);
  max_.set(id, priority);
  max_priority_ = max_.root();
}

std::size_t PrioritizedBuffer::push(Transition t) {
  const double initial = entries_.empty() ? 1.0 : max_.root();
  std::size_t id = 0;
  if (entries_.size() < options_.capacity) {
    id = entries_.size();
    entries_.push_back(std::move(t));
    priorities_.push_back(0.0);
  } else {
    if (agent_fifo_.empty())
      throw std::length_error("replay: buffer is full of demonstrations; cannot evict");
    id = agent_fifo_.front();
    agent_fifo_.pop_front();
    entries_[id] = std::move(t);
  }
  if (entries_[id].is_demo)
    ++demo_count_;
  else
    agent_fifo_.push_back(id);
  set_priority(id, initial);
  return id;
}

std::vector<SampledEntry> PrioritizedBuffer::sample(std::size_t batch_size, double beta,
                                                    Rng& rng) const {
  require(!entries_.empty(), "replay: cannot sample an empty buffer");
  require(batch_size >= 1, "replay: batch size must be positive");
  const double total = sum_.root();
  const double n = static_cast<double>(entries_.size());
  const double max_weight = std::pow(n * min_.root() / total, -beta);
  const double segment = total / static_cast<double>(batch_size);

  std::vector<SampledEntry> batch;
  batch.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) {
    const double mass = segment * (static_cast<double>(i) + uniform01(rng));
    std::size_t id = sum_.find_prefix(std::min(mass, std::nextafter(total, 0.0)));
    if (id >= entries_.size()) id = entries_.size() - 1;
    const double probability = sum_.get(id) / total;
    batch.push_back({id, std::pow(n * probability, -beta) / max_weight});
  }
  return batch;
}

void PrioritizedBuffer::update_priorities(std::span<const std::size_t> ids,
                                          std::span<const double> td_errors) {
  require(ids.size() == td_errors.size(), "replay: ids and td_errors differ in length");
  for (std::size_t k = 0; k < ids.size(); ++k) {
    require(ids[k] < entries_.size(), "replay: unknown entry id " + std::to_string(ids[k]));
    require(std::isfinite(td_errors[k]), "replay: non-finite td error");
    double p = std::abs(td_errors[k]) + options_.eps_agent;
    if (entries_[ids[k]].is_demo) p += options_.eps_demo;
    set_priority(ids[k], p);
  }
}

const Transition& PrioritizedBuffer::at(std::size_t id) const {
  require(id < entries_.size(), "replay: unknown entry id " + std::to_string(id));
  return entries_[id];
}

double PrioritizedBuffer::priority(std::size_t id) const {
  require(id < entries_.size(), "replay: unknown entry id " + std::to_string(id));
  return priorities_[id];
}

bool PrioritizedBuffer::tree_consistent() const {
  return sum_.consistent() && min_.consistent() && max_.consistent();
}

namespace {

void write_vector(std::ostream& out, const std::vector<double>& v) {
  out << v.size();
  for (double x : v) out << ' ' << nn::format_exact(x);
}

std::vector<double> read_vector(std::istream& in) {
  std::size_t n = 0;
  in >> n;
  std::vector<double> v(n);
  std::string token;
  for (auto& x : v) {
    in >> token;
    x = nn::parse_exact(token);
  }
  return v;
}

}  // namespace

// Format: "replay-buffer 1 <capacity> <alpha> <eps_agent> <eps_demo> <size>",
// one line per entry (priority, flags, vectors), then the FIFO order.
void PrioritizedBuffer::save(std::ostream& out) const {
  out << "replay-buffer 1 " << options_.capacity << ' ' << nn::format_exact(options_.alpha) << ' '
      << nn::format_exact(options_.eps_agent) << ' ' << nn::format_exact(options_.eps_demo) << ' '
      << entries_.size() << '\n';
  for (std::size_t id = 0; id < entries_.size(); ++id) {
    const auto& t = entries_[id];
    out << nn::format_exact(priorities_[id]) << ' ' << t.action << ' '
        << nn::format_exact(t.reward) << ' ' << t.terminal << ' ' << t.is_demo << ' ';
    write_vector(out, t.state);
    out << ' ';
    write_vector(out, t.next_state);
    out << ' ' << t.mask.size();
    for (auto m : t.mask) out << ' ' << static_cast<int>(m);
    out << ' ' << t.n_step.has_value();
    if (t.n_step) {
      out << ' ' << nn::format_exact(t.n_step->discounted_return) << ' ' << t.n_step->length << ' '
          << t.n_step->terminal << ' ';
      write_vector(out, t.n_step->state);
    }
    out << '\n';
  }
  out << "fifo " << agent_fifo_.size();
  for (std::size_t id : agent_fifo_) out << ' ' << id;
  out << "\nend\n";
}

PrioritizedBuffer PrioritizedBuffer::load(std::istream& in) {
  std::string magic, token;
  int version = 0;
  in >> magic >> version;
  if (magic != "replay-buffer" || version != 1)
    throw std::runtime_error("replay: not a version-1 buffer dump");
  ReplayOptions options;
  std::size_t size = 0;
  in >> options.capacity;
  in >> token;
  options.alpha = nn::parse_exact(token);
  in >> token;
  options.eps_agent = nn::parse_exact(token);
  in >> token;
  options.eps_demo = nn::parse_exact(token);
  in >> size;
  PrioritizedBuffer buffer(options);
  for (std::size_t id = 0; id < size; ++id) {
    Transition t;
    in >> token;
    const double priority = nn::parse_exact(token);
    in >> t.action >> token;
    t.reward = nn::parse_exact(token);
    in >> t.terminal >> t.is_demo;
    t.state = read_vector(in);
    t.next_state = read_vector(in);
    std::size_t mask_len = 0;
    in >> mask_len;
    t.mask.resize(mask_len);
    for (auto& m : t.mask) {
      int bit = 0;
      in >> bit;
      m = static_cast<std::uint8_t>(bit);
    }
    bool has_n_step = false;
    in >> has_n_step;
    if (has_n_step) {
      NStepInfo info;
      in >> token;
      info.discounted_return = nn::parse_exact(token);
      in >> info.length >> info.terminal;
      info.state = read_vector(in);
      t.n_step = std::move(info);
    }
    if (!in) throw std::runtime_error("replay: truncated buffer dump");
    if (t.is_demo) ++buffer.demo_count_;
    buffer.entries_.push_back(std::move(t));
    buffer.priorities_.push_back(0.0);
    buffer.set_priority(id, priority);
  }
  std::size_t fifo_len = 0;
  in >> token >> fifo_len;
  if (token != "fifo") throw std::runtime_error("replay: missing fifo section");
  for (std::size_t k = 0; k < fifo_len; ++k) {
    std::size_t id = 0;
    in >> id;
    buffer.agent_fifo_.push_back(id);
  }
  in >> token;
  if (token != "end") throw std::runtime_error("replay: missing end marker");
  return buffer;
}

std::vector<std::uint8_t> draw_mask(Rng& rng, std::size_t heads, double p) {
  require(p > 0.0 && p <= 1.0, "draw_mask: p must lie in (0, 1]");
  std::vector<std::uint8_t> mask(heads, 1);
  if (p >= 1.0) return mask;
  std::bernoulli_distribution coin(p);
  do {
    for (auto& m : mask) m = coin(rng) ? 1 : 0;
  } while (std::none_of(mask.begin(), mask.end(), [](std::uint8_t m) { return m != 0; }));
  return mask;
}

}  // namespace arld::replay
