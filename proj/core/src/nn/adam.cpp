#include "arld/nn/adam.hpp"

#include <cmath>
#include <stdexcept>

#include "arld/error.hpp"

namespace arld::nn {

AdamState::AdamState(std::span<const Tensor* const> params, AdamOptions options)
    : options_(options) {
  m_.reserve(params.size());
  v_.reserve(params.size());
  for (const Tensor* p : params) {
    m_.emplace_back(p->shape(), 0.0);
    v_.emplace_back(p->shape(), 0.0);
  }
}

AdamState::AdamState(const QNetwork& params, AdamOptions options)
    : AdamState(std::span<const Tensor* const>(params.parameters()), options) {}

void adam_step(AdamState& state, std::span<Tensor* const> params,
               std::span<const Tensor* const> grads) {
  require(params.size() == state.m_.size() && grads.size() == params.size(),
          "adam_step: parameter list mismatch");
  for (std::size_t k = 0; k < params.size(); ++k) {
    require(params[k]->same_shape(state.m_[k]) && grads[k]->same_shape(state.m_[k]),
            "adam_step: tensor shape mismatch");
    if (!grads[k]->all_finite())
      throw std::domain_error("adam_step: non-finite gradient; step aborted");
  }

  const auto& opt = state.options_;
  ++state.steps_;
  const double t = static_cast<double>(state.steps_);
  const double correction1 = 1.0 - std::pow(opt.beta1, t);
  const double correction2 = 1.0 - std::pow(opt.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto p = params[k]->values();
    const auto g = grads[k]->values();
    auto m = state.m_[k].values();
    auto v = state.v_[k].values();
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = opt.beta1 * m[i] + (1.0 - opt.beta1) * g[i];
      v[i] = opt.beta2 * v[i] + (1.0 - opt.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      p[i] -= opt.learning_rate * m_hat / (std::sqrt(v_hat) + opt.epsilon);
    }
  }
}

void adam_step(AdamState& state, QNetwork& params, const QNetwork& grads) {
  auto p = params.parameters();
  auto g = grads.parameters();
  adam_step(state, std::span<Tensor* const>(p), std::span<const Tensor* const>(g));
}

}  // namespace arld::nn
