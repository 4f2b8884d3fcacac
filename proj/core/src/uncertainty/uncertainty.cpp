#include "arld/uncertainty/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "arld/error.hpp"

namespace arld::uncertainty {

std::vector<double> softmax_policy(std::span<const double> q_values) {
  require(!q_values.empty(), "softmax_policy: empty input");
  const double top = *std::max_element(q_values.begin(), q_values.end());
  require(std::isfinite(top), "softmax_policy: non-finite Q-value");
  std::vector<double> p(q_values.size());
  double total = 0.0;
  for (std::size_t a = 0; a < q_values.size(); ++a) {
    require(std::isfinite(q_values[a]), "softmax_policy: non-finite Q-value");
    p[a] = std::exp(q_values[a] - top);
    total += p[a];
  }
  for (double& x : p) x /= total;
  return p;
}

double entropy(std::span<const double> distribution) {
  double h = 0.0;
  for (double p : distribution)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

namespace {

void check_distribution(std::span<const double> p, std::size_t expected_size) {
  require(p.size() == expected_size, "js_divergence: policies differ in length");
  double total = 0.0;
  for (double x : p) {
    require(std::isfinite(x) && x >= 0.0, "js_divergence: negative or non-finite probability");
    total += x;
  }
  require(std::abs(total - 1.0) <= 1e-9,
          "js_divergence: probabilities sum to " + std::to_string(total));
}

}  // namespace

UncertaintyValue js_divergence(std::span<const std::vector<double>> policies) {
  require(policies.size() >= 2, "js_divergence: need at least two policies");
  const std::size_t actions = policies.front().size();
  std::vector<double> mixture(actions, 0.0);
  double mean_entropy = 0.0;
  for (const auto& pi : policies) {
    check_distribution(pi, actions);
    for (std::size_t a = 0; a < actions; ++a) mixture[a] += pi[a];
    mean_entropy += entropy(pi);
  }
  const double k = static_cast<double>(policies.size());
  for (double& m : mixture) m /= k;
  mean_entropy /= k;
  // Rounding can push an exact zero slightly negative.
  return {std::max(0.0, entropy(mixture) - mean_entropy), Kind::divergence};
}

UncertaintyValue predictive_variance(const nn::NoisyLayer& layer,
                                     std::span<const double> features) {
  require(features.size() == layer.in(), "predictive_variance: feature length mismatch");
  std::size_t best = 0;
  double best_q = -INFINITY;
  for (std::size_t a = 0; a < layer.out(); ++a) {
    const auto mu = layer.mu_w.row(a);
    double q = layer.mu_b[a];
    for (std::size_t j = 0; j < features.size(); ++j) q += mu[j] * features[j];
    if (q > best_q) {
      best_q = q;
      best = a;
    }
  }
  const auto sigma = layer.sigma_w.row(best);
  double var = layer.sigma_b[best] * layer.sigma_b[best];
  for (std::size_t j = 0; j < features.size(); ++j) {
    const double s = sigma[j] * features[j];
    var += s * s;
  }
  return {var, Kind::variance};
}

UncertaintyValue head_divergence(const nn::QNetwork& net, std::span<const double> state) {
  require(net.output_kind() == nn::OutputKind::bootstrapped,
          "head_divergence: network has no bootstrapped heads");
  const auto features = nn::trunk_features(net, state);
  std::vector<std::vector<double>> policies;
  policies.reserve(net.head_count());
  for (std::size_t k = 0; k < net.head_count(); ++k)
    policies.push_back(softmax_policy(nn::output_values(net, features, nn::Head{k})));
  if (policies.size() == 1) return {0.0, Kind::divergence};
  return js_divergence(policies);
}

UncertaintyValue state_uncertainty(const nn::QNetwork& net, std::span<const double> state) {
  if (net.output_kind() == nn::OutputKind::bootstrapped) return head_divergence(net, state);
  return predictive_variance(net.noisy_out(), nn::trunk_features(net, state));
}

}  // namespace arld::uncertainty
