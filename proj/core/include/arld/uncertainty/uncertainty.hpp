#pragma once

#include <span>
#include <vector>

#include "arld/nn/layers.hpp"
#include "arld/nn/network.hpp"

namespace arld::uncertainty {

enum class Kind { divergence, variance };

struct UncertaintyValue {
  double value = 0.0;
  Kind kind = Kind::divergence;
};

/// pi(a) = exp(Q(a)) / sum_a' exp(Q(a')), evaluated max-shifted.
std::vector<double> softmax_policy(std::span<const double> q_values);

/// Shannon entropy in nats; 0 ln 0 is taken as 0.
double entropy(std::span<const double> distribution);

/// Jensen-Shannon divergence of K >= 2 distributions:
/// H(mean of policies) - mean of H(policy). Bounded by ln K.
UncertaintyValue js_divergence(std::span<const std::vector<double>> policies);

/// Variance of Q(s, a*) under the noisy output layer, where a* is the argmax of
/// the mean Q-values: sum_j (sigma_w[a*, j] phi_j)^2 + sigma_b[a*]^2.
UncertaintyValue predictive_variance(const nn::NoisyLayer& layer, std::span<const double> features);

/// Divergence of the softmax policies of every bootstrapped head at `state`.
UncertaintyValue head_divergence(const nn::QNetwork& net, std::span<const double> state);

/// Dispatches on the network variant: head divergence or predictive variance.
UncertaintyValue state_uncertainty(const nn::QNetwork& net, std::span<const double> state);

}  // namespace arld::uncertainty
