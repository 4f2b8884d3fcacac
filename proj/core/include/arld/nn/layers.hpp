#pragma once

#include <span>
#include <vector>

#include "arld/nn/tensor.hpp"
#include "arld/random.hpp"

namespace arld::nn {

struct DenseLayer {
  Tensor weights;  // [out x in]
  Tensor bias;     // [out]

  DenseLayer() = default;
  DenseLayer(std::size_t in, std::size_t out)
      : weights(Tensor::matrix(out, in)), bias(Tensor::vector(out)) {}

  std::size_t in() const noexcept { return weights.cols(); }
  std::size_t out() const noexcept { return weights.rows(); }

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

/// Linear layer whose weights and biases are perturbed by learned Gaussian noise:
/// w = mu_w + sigma_w * eps_w, b = mu_b + sigma_b * eps_b.
struct NoisyLayer {
  Tensor mu_w;     // [q x p]
  Tensor sigma_w;  // [q x p]
  Tensor mu_b;     // [q]
  Tensor sigma_b;  // [q]

  NoisyLayer() = default;
  NoisyLayer(std::size_t p, std::size_t q)
      : mu_w(Tensor::matrix(q, p)),
        sigma_w(Tensor::matrix(q, p)),
        mu_b(Tensor::vector(q)),
        sigma_b(Tensor::vector(q)) {}

  std::size_t in() const noexcept { return mu_w.cols(); }
  std::size_t out() const noexcept { return mu_w.rows(); }

  friend bool operator==(const NoisyLayer&, const NoisyLayer&) = default;
};

/// f(x) = sign(x) * sqrt(|x|), the factorized-noise shaping function.
double scale_noise(double x) noexcept;

/// Factorized Gaussian noise for a p -> q noisy layer. Only p + q standard
/// normals are drawn; the q x p weight noise is their scaled outer product.
struct NoiseSample {
  std::vector<double> eps_in;   // [p]
  std::vector<double> eps_out;  // [q]

  double weight_noise(std::size_t i, std::size_t j) const noexcept {
    return scale_noise(eps_out[i]) * scale_noise(eps_in[j]);
  }
  double bias_noise(std::size_t i) const noexcept { return scale_noise(eps_out[i]); }

  /// Materialized eps_w [q x p].
  Tensor weight_noise() const;
  /// Materialized eps_b [q].
  Tensor bias_noise() const;

  friend bool operator==(const NoiseSample&, const NoiseSample&) = default;
};

NoiseSample sample_noise(Rng& rng, std::size_t p, std::size_t q);

/// An all-zero sample: the noisy layer collapses to its mean parameters.
NoiseSample zero_noise(std::size_t p, std::size_t q);

/// y = W x + b.
std::vector<double> dense_affine(const DenseLayer& layer, std::span<const double> x);

/// y = (mu_w + sigma_w * eps_w) x + mu_b + sigma_b * eps_b.
std::vector<double> noisy_affine(const NoisyLayer& layer, const NoiseSample& noise,
                                 std::span<const double> x);

}  // namespace arld::nn
