#pragma once

#include <span>
#include <vector>

namespace edeen {

enum class OptimizerKind { Adam, Sgd };

struct OptimizerSettings {
  OptimizerKind kind = OptimizerKind::Adam;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Optimizer state for one parameter bundle. With kind == Sgd the moments are
/// left empty and an update is p -= lr * g.
class AdamState {
 public:
  AdamState() = default;
  AdamState(OptimizerSettings settings, std::span<const std::size_t> tensor_sizes);

  const OptimizerSettings& settings() const noexcept { return settings_; }
  std::size_t step() const noexcept { return step_; }
  const std::vector<std::vector<double>>& first_moment() const noexcept { return m_; }
  const std::vector<std::vector<double>>& second_moment() const noexcept { return v_; }

  void update(std::span<const std::span<double>> params,
              std::span<const std::vector<double>> grads);

 private:
  OptimizerSettings settings_;
  std::vector<std::size_t> sizes_;
  std::size_t step_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

inline void adam_step(AdamState& state, std::span<const std::span<double>> params,
                      std::span<const std::vector<double>> grads) {
  state.update(params, grads);
}

}  // namespace edeen
