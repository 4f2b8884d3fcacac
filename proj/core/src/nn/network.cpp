#include "arld/nn/network.hpp"

#include <cmath>
#include <string>

#include "arld/error.hpp"

namespace arld::nn {

double scale_noise(double x) noexcept {
  return std::copysign(std::sqrt(std::abs(x)), x);
}

Tensor NoiseSample::weight_noise() const {
  Tensor eps = Tensor::matrix(eps_out.size(), eps_in.size());
  for (std::size_t i = 0; i < eps_out.size(); ++i)
    for (std::size_t j = 0; j < eps_in.size(); ++j) eps(i, j) = weight_noise(i, j);
  return eps;
}

Tensor NoiseSample::bias_noise() const {
  Tensor eps = Tensor::vector(eps_out.size());
  for (std::size_t i = 0; i < eps_out.size(); ++i) eps[i] = bias_noise(i);
  return eps;
}

NoiseSample sample_noise(Rng& rng, std::size_t p, std::size_t q) {
  require(p >= 1 && q >= 1, "sample_noise: p and q must be positive");
  std::normal_distribution<double> normal(0.0, 1.0);
  NoiseSample noise;
  noise.eps_in.resize(p);
  noise.eps_out.resize(q);
  for (auto& e : noise.eps_in) e = normal(rng);
  for (auto& e : noise.eps_out) e = normal(rng);
  return noise;
}

NoiseSample zero_noise(std::size_t p, std::size_t q) {
  return NoiseSample{std::vector<double>(p, 0.0), std::vector<double>(q, 0.0)};
}

std::vector<double> dense_affine(const DenseLayer& layer, std::span<const double> x) {
  require(x.size() == layer.in(), "dense_affine: input width " + std::to_string(x.size()) +
                                      " != layer width " + std::to_string(layer.in()));
  std::vector<double> y(layer.out());
  for (std::size_t i = 0; i < layer.out(); ++i) {
    const auto w = layer.weights.row(i);
    double acc = layer.bias[i];
    for (std::size_t j = 0; j < x.size(); ++j) acc += w[j] * x[j];
    y[i] = acc;
  }
  return y;
}

std::vector<double> noisy_affine(const NoisyLayer& layer, const NoiseSample& noise,
                                 std::span<const double> x) {
  require(x.size() == layer.in(), "noisy_affine: input width mismatch");
  require(noise.eps_in.size() == layer.in() && noise.eps_out.size() == layer.out(),
          "noisy_affine: noise sample shape mismatch");
  std::vector<double> f_in(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) f_in[j] = scale_noise(noise.eps_in[j]);
  std::vector<double> y(layer.out());
  for (std::size_t i = 0; i < layer.out(); ++i) {
    const double f_out = scale_noise(noise.eps_out[i]);
    const auto mu = layer.mu_w.row(i);
    const auto sigma = layer.sigma_w.row(i);
    double acc = layer.mu_b[i] + layer.sigma_b[i] * f_out;
    for (std::size_t j = 0; j < x.size(); ++j) acc += (mu[j] + sigma[j] * f_out * f_in[j]) * x[j];
    y[i] = acc;
  }
  return y;
}

QNetwork::QNetwork(const NetworkSpec& spec) : spec_(spec) {
  require(spec.input_dim >= 1, "network: input_dim must be positive");
  require(spec.num_actions >= 1, "network: num_actions must be positive");
  std::size_t width = spec.input_dim;
  for (std::size_t h : spec.hidden) {
    require(h >= 1, "network: hidden widths must be positive");
    trunk_.emplace_back(width, h);
    width = h;
  }
  if (spec.output == OutputKind::noisy) {
    spec_.heads = 1;
    noisy_out_ = NoisyLayer(width, spec.num_actions);
  } else {
    require(spec.heads >= 1, "network: need at least one head");
    heads_.assign(spec.heads, DenseLayer(width, spec.num_actions));
  }
}

std::size_t QNetwork::feature_dim() const noexcept {
  return trunk_.empty() ? spec_.input_dim : trunk_.back().out();
}

std::vector<Tensor*> QNetwork::parameters() {
  std::vector<Tensor*> out;
  for (auto& layer : trunk_) {
    out.push_back(&layer.weights);
    out.push_back(&layer.bias);
  }
  if (spec_.output == OutputKind::noisy) {
    out.push_back(&noisy_out_.mu_w);
    out.push_back(&noisy_out_.sigma_w);
    out.push_back(&noisy_out_.mu_b);
    out.push_back(&noisy_out_.sigma_b);
  } else {
    for (auto& head : heads_) {
      out.push_back(&head.weights);
      out.push_back(&head.bias);
    }
  }
  return out;
}

std::vector<const Tensor*> QNetwork::parameters() const {
  auto mutable_params = const_cast<QNetwork*>(this)->parameters();
  return {mutable_params.begin(), mutable_params.end()};
}

std::size_t QNetwork::parameter_count() const {
  std::size_t n = 0;
  for (const Tensor* t : parameters()) n += t->size();
  return n;
}

void QNetwork::set_zero() {
  for (Tensor* t : parameters()) t->fill(0.0);
}

namespace {

void init_uniform(Tensor& t, double bound, Rng& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (double& v : t.values()) v = dist(rng);
}

void init_dense(DenseLayer& layer, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in()));
  init_uniform(layer.weights, bound, rng);
  init_uniform(layer.bias, bound, rng);
}

}  // namespace

QNetwork init_network(const NetworkSpec& spec, Rng& rng) {
  QNetwork net(spec);
  for (auto& layer : net.trunk()) init_dense(layer, rng);
  if (net.output_kind() == OutputKind::noisy) {
    auto& noisy = net.noisy_out();
    const double bound = 1.0 / std::sqrt(static_cast<double>(noisy.in()));
    init_uniform(noisy.mu_w, bound, rng);
    init_uniform(noisy.mu_b, bound, rng);
    noisy.sigma_w.fill(0.5 * bound);
    noisy.sigma_b.fill(0.5 * bound);
  } else {
    for (auto& head : net.heads()) init_dense(head, rng);
  }
  return net;
}

ForwardTrace trace_trunk(const QNetwork& net, std::span<const double> state) {
  require(state.size() == net.input_dim(),
          "forward: state length " + std::to_string(state.size()) + " != input width " +
              std::to_string(net.input_dim()));
  ForwardTrace trace;
  trace.inputs.reserve(net.trunk().size());
  trace.pre_activation.reserve(net.trunk().size());
  std::vector<double> x(state.begin(), state.end());
  for (const auto& layer : net.trunk()) {
    auto z = dense_affine(layer, x);
    trace.inputs.push_back(std::move(x));
    x = z;
    for (double& v : x) v = v > 0.0 ? v : 0.0;
    trace.pre_activation.push_back(std::move(z));
  }
  trace.features = std::move(x);
  trace.recorded = true;
  return trace;
}

std::vector<double> trunk_features(const QNetwork& net, std::span<const double> state) {
  require(state.size() == net.input_dim(), "forward: state length mismatch");
  std::vector<double> x(state.begin(), state.end());
  for (const auto& layer : net.trunk()) {
    x = dense_affine(layer, x);
    for (double& v : x) v = v > 0.0 ? v : 0.0;
  }
  return x;
}

std::vector<double> output_values(const QNetwork& net, std::span<const double> features,
                                  const OutputSelector& output) {
  if (const auto* head = std::get_if<Head>(&output)) {
    require(net.output_kind() == OutputKind::bootstrapped, "forward: head index on a noisy net");
    require(head->index < net.head_count(), "forward: head index out of range");
    return dense_affine(net.heads()[head->index], features);
  }
  require(net.output_kind() == OutputKind::noisy, "forward: noise sample on a bootstrapped net");
  const auto& layer = net.noisy_out();
  if (std::holds_alternative<MeanOutput>(output)) {
    DenseLayer mean;
    mean.weights = layer.mu_w;
    mean.bias = layer.mu_b;
    return dense_affine(mean, features);
  }
  return noisy_affine(layer, std::get<std::reference_wrapper<const NoiseSample>>(output).get(),
                      features);
}

ForwardResult forward(const QNetwork& net, std::span<const double> state,
                      const OutputSelector& output) {
  ForwardResult result;
  result.features = trunk_features(net, state);
  result.q_values = output_values(net, result.features, output);
  return result;
}

namespace {

// Accumulates dW += dy x^T, db += dy and returns dx = W^T dy.
std::vector<double> dense_backward(const DenseLayer& layer, std::span<const double> x,
                                   std::span<const double> dy, DenseLayer& grad) {
  std::vector<double> dx(layer.in(), 0.0);
  for (std::size_t i = 0; i < layer.out(); ++i) {
    const double g = dy[i];
    if (g == 0.0) continue;
    grad.bias[i] += g;
    auto gw = grad.weights.row(i);
    const auto w = layer.weights.row(i);
    for (std::size_t j = 0; j < x.size(); ++j) {
      gw[j] += g * x[j];
      dx[j] += g * w[j];
    }
  }
  return dx;
}

std::vector<double> noisy_backward(const NoisyLayer& layer, const NoiseSample& noise,
                                   std::span<const double> x, std::span<const double> dy,
                                   NoisyLayer& grad) {
  std::vector<double> dx(layer.in(), 0.0);
  std::vector<double> f_in(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) f_in[j] = scale_noise(noise.eps_in[j]);
  for (std::size_t i = 0; i < layer.out(); ++i) {
    const double g = dy[i];
    if (g == 0.0) continue;
    const double f_out = scale_noise(noise.eps_out[i]);
    grad.mu_b[i] += g;
    grad.sigma_b[i] += g * f_out;
    auto gmu = grad.mu_w.row(i);
    auto gsigma = grad.sigma_w.row(i);
    const auto mu = layer.mu_w.row(i);
    const auto sigma = layer.sigma_w.row(i);
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double eps = f_out * f_in[j];
      gmu[j] += g * x[j];
      gsigma[j] += g * eps * x[j];
      dx[j] += g * (mu[j] + sigma[j] * eps);
    }
  }
  return dx;
}

}  // namespace

void backward(const QNetwork& net, const ForwardTrace& trace,
              std::span<const OutputGradient> outputs, QNetwork& grads, double trunk_scale) {
  require(trace.recorded, "backward: no recorded forward pass");
  require(grads.spec() == net.spec(), "backward: gradient accumulator shape mismatch");
  require(trace.features.size() == net.feature_dim(), "backward: trace does not match network");

  std::vector<double> d_features(net.feature_dim(), 0.0);
  for (const auto& out : outputs) {
    require(out.dq.size() == net.num_actions(), "backward: dq length mismatch");
    std::vector<double> dx;
    if (const auto* head = std::get_if<Head>(&out.output)) {
      require(net.output_kind() == OutputKind::bootstrapped && head->index < net.head_count(),
              "backward: invalid head");
      dx = dense_backward(net.heads()[head->index], trace.features, out.dq,
                          grads.heads()[head->index]);
    } else {
      require(net.output_kind() == OutputKind::noisy, "backward: noise on a bootstrapped net");
      if (std::holds_alternative<MeanOutput>(out.output)) {
        const NoiseSample zero = zero_noise(net.feature_dim(), net.num_actions());
        dx = noisy_backward(net.noisy_out(), zero, trace.features, out.dq, grads.noisy_out());
      } else {
        dx = noisy_backward(net.noisy_out(),
                            std::get<std::reference_wrapper<const NoiseSample>>(out.output).get(),
                            trace.features, out.dq, grads.noisy_out());
      }
    }
    for (std::size_t j = 0; j < dx.size(); ++j) d_features[j] += dx[j];
  }
  for (double& d : d_features) d *= trunk_scale;

  std::vector<double> upstream = std::move(d_features);
  for (std::size_t l = net.trunk().size(); l-- > 0;) {
    const auto& z = trace.pre_activation[l];
    for (std::size_t i = 0; i < upstream.size(); ++i)
      if (z[i] <= 0.0) upstream[i] = 0.0;
    upstream = dense_backward(net.trunk()[l], trace.inputs[l], upstream, grads.trunk()[l]);
  }
}

}  // namespace arld::nn
