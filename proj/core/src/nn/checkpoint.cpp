#include "arld/nn/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace arld::nn {

std::string format_exact(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a", value);
  return buf;
}

double parse_exact(const std::string& token) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0')
    throw std::runtime_error("checkpoint: bad number '" + token + "'");
  return v;
}

namespace {

void expect(std::istream& in, const std::string& word) {
  std::string got;
  if (!(in >> got) || got != word)
    throw std::runtime_error("checkpoint: expected '" + word + "', found '" + got + "'");
}

}  // namespace

void write_tensor(std::ostream& out, std::string_view name, const Tensor& tensor) {
  out << "tensor " << name << ' ' << tensor.rank();
  for (std::size_t d : tensor.shape()) out << ' ' << d;
  out << '\n';
  bool first = true;
  for (double v : tensor.values()) {
    if (!first) out << ' ';
    out << format_exact(v);
    first = false;
  }
  out << '\n';
}

Tensor read_tensor(std::istream& in, std::string_view expected_name) {
  expect(in, "tensor");
  std::string name;
  in >> name;
  if (name != expected_name)
    throw std::runtime_error("checkpoint: expected tensor '" + std::string(expected_name) +
                             "', found '" + name + "'");
  std::size_t rank = 0;
  in >> rank;
  std::vector<std::size_t> shape(rank);
  std::size_t count = 1;
  for (auto& d : shape) {
    in >> d;
    count *= d;
  }
  std::vector<double> values(count);
  std::string token;
  for (auto& v : values) {
    if (!(in >> token)) throw std::runtime_error("checkpoint: truncated tensor " + name);
    v = parse_exact(token);
  }
  return Tensor(std::move(shape), std::move(values));
}

void write_network_body(std::ostream& out, const QNetwork& net) {
  const auto& spec = net.spec();
  out << "network " << spec.input_dim << ' ' << spec.hidden.size();
  for (std::size_t h : spec.hidden) out << ' ' << h;
  out << ' ' << spec.num_actions << ' '
      << (spec.output == OutputKind::noisy ? "noisy" : "bootstrapped") << ' ' << spec.heads
      << '\n';
  for (std::size_t l = 0; l < net.trunk().size(); ++l) {
    write_tensor(out, "trunk." + std::to_string(l) + ".weights", net.trunk()[l].weights);
    write_tensor(out, "trunk." + std::to_string(l) + ".bias", net.trunk()[l].bias);
  }
  if (spec.output == OutputKind::noisy) {
    write_tensor(out, "noisy.mu_w", net.noisy_out().mu_w);
    write_tensor(out, "noisy.sigma_w", net.noisy_out().sigma_w);
    write_tensor(out, "noisy.mu_b", net.noisy_out().mu_b);
    write_tensor(out, "noisy.sigma_b", net.noisy_out().sigma_b);
  } else {
    for (std::size_t k = 0; k < net.head_count(); ++k) {
      write_tensor(out, "head." + std::to_string(k) + ".weights", net.heads()[k].weights);
      write_tensor(out, "head." + std::to_string(k) + ".bias", net.heads()[k].bias);
    }
  }
}

QNetwork read_network_body(std::istream& in) {
  expect(in, "network");
  NetworkSpec spec;
  std::size_t hidden_count = 0;
  in >> spec.input_dim >> hidden_count;
  spec.hidden.resize(hidden_count);
  for (auto& h : spec.hidden) in >> h;
  std::string kind;
  in >> spec.num_actions >> kind >> spec.heads;
  if (!in) throw std::runtime_error("checkpoint: malformed network header");
  if (kind == "noisy")
    spec.output = OutputKind::noisy;
  else if (kind == "bootstrapped")
    spec.output = OutputKind::bootstrapped;
  else
    throw std::runtime_error("checkpoint: unknown output kind '" + kind + "'");

  QNetwork net(spec);
  auto check = [](const Tensor& got, const Tensor& want) {
    if (!got.same_shape(want)) throw std::runtime_error("checkpoint: tensor shape mismatch");
    return got;
  };
  for (std::size_t l = 0; l < net.trunk().size(); ++l) {
    auto& layer = net.trunk()[l];
    layer.weights = check(read_tensor(in, "trunk." + std::to_string(l) + ".weights"), layer.weights);
    layer.bias = check(read_tensor(in, "trunk." + std::to_string(l) + ".bias"), layer.bias);
  }
  if (spec.output == OutputKind::noisy) {
    auto& n = net.noisy_out();
    n.mu_w = check(read_tensor(in, "noisy.mu_w"), n.mu_w);
    n.sigma_w = check(read_tensor(in, "noisy.sigma_w"), n.sigma_w);
    n.mu_b = check(read_tensor(in, "noisy.mu_b"), n.mu_b);
    n.sigma_b = check(read_tensor(in, "noisy.sigma_b"), n.sigma_b);
  } else {
    for (std::size_t k = 0; k < net.head_count(); ++k) {
      auto& head = net.heads()[k];
      head.weights = check(read_tensor(in, "head." + std::to_string(k) + ".weights"), head.weights);
      head.bias = check(read_tensor(in, "head." + std::to_string(k) + ".bias"), head.bias);
    }
  }
  return net;
}

void save_network(std::ostream& out, const QNetwork& net) {
  out << "arld-checkpoint " << kCheckpointVersion << '\n';
  write_network_body(out, net);
  out << "end\n";
}

QNetwork load_network(std::istream& in) {
  expect(in, "arld-checkpoint");
  int version = 0;
  in >> version;
  if (version != kCheckpointVersion)
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
  QNetwork net = read_network_body(in);
  expect(in, "end");
  return net;
}

void save_network(const std::string& path, const QNetwork& net) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  save_network(out, net);
}

QNetwork load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return load_network(in);
}

}  // namespace arld::nn
