#include "edeen/optim.hpp"

#include <cmath>

#include "edeen/error.hpp"

namespace edeen {

AdamState::AdamState(OptimizerSettings settings, std::span<const std::size_t> tensor_sizes)
    : settings_(settings), sizes_(tensor_sizes.begin(), tensor_sizes.end()) {
  if (settings_.kind == OptimizerKind::Adam) {
    for (std::size_t n : sizes_) {
      m_.emplace_back(n, 0.0);
      v_.emplace_back(n, 0.0);
    }
  }
}

void AdamState::update(std::span<const std::span<double>> params,
                       std::span<const std::vector<double>> grads) {
  if (params.size() != sizes_.size() || grads.size() != sizes_.size())
    throw ShapeError("optimizer: tensor count mismatch");
  for (std::size_t t = 0; t < sizes_.size(); ++t)
    if (params[t].size() != sizes_[t] || grads[t].size() != sizes_[t])
      throw ShapeError("optimizer: tensor " + std::to_string(t) + " size mismatch");

  ++step_;
  const double lr = settings_.lr;
  if (settings_.kind == OptimizerKind::Sgd) {
    for (std::size_t t = 0; t < sizes_.size(); ++t)
      for (std::size_t i = 0; i < sizes_[t]; ++i) params[t][i] -= lr * grads[t][i];
    return;
  }

  const double b1 = settings_.beta1;
  const double b2 = settings_.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  for (std::size_t t = 0; t < sizes_.size(); ++t) {
    auto& m = m_[t];
    auto& v = v_[t];
    for (std::size_t i = 0; i < sizes_[t]; ++i) {
      const double g = grads[t][i];
      m[i] = b1 * m[i] + (1.0 - b1) * g;
      v[i] = b2 * v[i] + (1.0 - b2) * g * g;
      const double mhat = m[i] / correction1;
      const double vhat = v[i] / correction2;
      params[t][i] -= lr * mhat / (std::sqrt(vhat) + settings_.eps);
    }
  }
}

}  // namespace edeen
