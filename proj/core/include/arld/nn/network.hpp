#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "arld/nn/layers.hpp"
#include "arld/nn/tensor.hpp"
#include "arld/random.hpp"

namespace arld::nn {

enum class OutputKind { bootstrapped, noisy };

struct NetworkSpec {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden{64, 64};
  std::size_t num_actions = 0;
  OutputKind output = OutputKind::bootstrapped;
  std::size_t heads = 1;  // K; forced to 1 for the noisy variant

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

/// ReLU trunk followed by either K independent dense heads or one noisy layer.
/// Gradients and Adam moments reuse this type: a zeros_like() network is a
/// parameter-shaped accumulator.
class QNetwork {
 public:
  QNetwork() = default;
  explicit QNetwork(const NetworkSpec& spec);  // all parameters zero

  const NetworkSpec& spec() const noexcept { return spec_; }
  OutputKind output_kind() const noexcept { return spec_.output; }
  std::size_t num_actions() const noexcept { return spec_.num_actions; }
  std::size_t head_count() const noexcept { return heads_.size(); }
  std::size_t input_dim() const noexcept { return spec_.input_dim; }
  std::size_t feature_dim() const noexcept;

  std::vector<DenseLayer>& trunk() noexcept { return trunk_; }
  const std::vector<DenseLayer>& trunk() const noexcept { return trunk_; }
  std::vector<DenseLayer>& heads() noexcept { return heads_; }
  const std::vector<DenseLayer>& heads() const noexcept { return heads_; }
  NoisyLayer& noisy_out() noexcept { return noisy_out_; }
  const NoisyLayer& noisy_out() const noexcept { return noisy_out_; }

  /// Every trainable tensor in a fixed order (trunk, then heads or noisy layer).
  std::vector<Tensor*> parameters();
  std::vector<const Tensor*> parameters() const;
  std::size_t parameter_count() const;

  QNetwork zeros_like() const { return QNetwork(spec_); }
  void set_zero();

  friend bool operator==(const QNetwork&, const QNetwork&) = default;

 private:
  NetworkSpec spec_;
  std::vector<DenseLayer> trunk_;
  std::vector<DenseLayer> heads_;
  NoisyLayer noisy_out_;
};

/// Dense layers: U(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases.
/// Noisy layer: mu ~ U(-1/sqrt(p), 1/sqrt(p)), sigma = 0.5/sqrt(p).
QNetwork init_network(const NetworkSpec& spec, Rng& rng);

/// Deep copy used for the target network.
inline QNetwork copy_to_target(const QNetwork& online) { return online; }

struct Head {
  std::size_t index = 0;
};
struct MeanOutput {};
/// Which output a pass goes through: a bootstrapped head, the noisy layer under
/// a given noise sample, or the noisy layer's mean (zero noise).
using OutputSelector = std::variant<Head, std::reference_wrapper<const NoiseSample>, MeanOutput>;

/// Intermediates of a trunk pass needed by backward().
struct ForwardTrace {
  std::vector<std::vector<double>> inputs;       // input of each trunk layer
  std::vector<std::vector<double>> pre_activation;
  std::vector<double> features;                  // ReLU output of the last trunk layer
  bool recorded = false;
};

struct ForwardResult {
  std::vector<double> q_values;
  std::vector<double> features;
};

ForwardTrace trace_trunk(const QNetwork& net, std::span<const double> state);
std::vector<double> trunk_features(const QNetwork& net, std::span<const double> state);
std::vector<double> output_values(const QNetwork& net, std::span<const double> features,
                                  const OutputSelector& output);
ForwardResult forward(const QNetwork& net, std::span<const double> state,
                      const OutputSelector& output);

/// dLoss/dQ for one output of a recorded pass.
struct OutputGradient {
  OutputSelector output;
  std::vector<double> dq;
};

/// Accumulates parameter gradients into `grads` (must be shaped like `net`).
/// Feature gradients from all outputs are summed and multiplied by
/// `trunk_scale` before entering the trunk; heads not listed receive nothing.
void backward(const QNetwork& net, const ForwardTrace& trace,
              std::span<const OutputGradient> outputs, QNetwork& grads,
              double trunk_scale = 1.0);

}  // namespace arld::nn
