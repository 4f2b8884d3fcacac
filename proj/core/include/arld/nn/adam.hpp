#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "arld/nn/network.hpp"
#include "arld/nn/tensor.hpp"

namespace arld::nn {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class AdamState {
 public:
  AdamState() = default;
  AdamState(std::span<const Tensor* const> params, AdamOptions options);
  AdamState(const QNetwork& params, AdamOptions options);

  const AdamOptions& options() const noexcept { return options_; }
  void set_learning_rate(double lr) noexcept { options_.learning_rate = lr; }
  std::uint64_t steps() const noexcept { return steps_; }
  const std::vector<Tensor>& first_moments() const noexcept { return m_; }
  const std::vector<Tensor>& second_moments() const noexcept { return v_; }

  friend void adam_step(AdamState& state, std::span<Tensor* const> params,
                        std::span<const Tensor* const> grads);

 private:
  AdamOptions options_;
  std::uint64_t steps_ = 0;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
};

/// Bias-corrected Adam update applied in place. Non-finite gradients raise
/// std::domain_error before anything is modified.
void adam_step(AdamState& state, std::span<Tensor* const> params,
               std::span<const Tensor* const> grads);
void adam_step(AdamState& state, QNetwork& params, const QNetwork& grads);

}  // namespace arld::nn
