#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "edeen/arch.hpp"
#include "edeen/ede.hpp"
#include "edeen/matrix.hpp"
#include "edeen/optim.hpp"

namespace edeen {

/// I encoder-decoder-encoder members sharing one architecture.
class EnsembleModel {
 public:
  EnsembleModel() = default;
  EnsembleModel(ArchSpec spec, std::uint64_t seed, std::vector<EdeNet> members);

  const ArchSpec& spec() const noexcept { return spec_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t size() const noexcept { return members_.size(); }
  const std::vector<EdeNet>& members() const noexcept { return members_; }
  EdeNet& member(std::size_t i) { return members_.at(i); }
  const EdeNet& member(std::size_t i) const { return members_.at(i); }

  friend bool operator==(const EnsembleModel&, const EnsembleModel&) = default;

 private:
  ArchSpec spec_;
  std::uint64_t seed_ = 0;
  std::vector<EdeNet> members_;
};

/// Member i is initialized from mix_seed(seed, i).
EnsembleModel init_ensemble(const ArchSpec& spec, std::size_t members, std::uint64_t seed);

/// Mean of the members' encoding-error scores.
std::vector<double> ensemble_score(const EnsembleModel& model, const Matrix& x);

struct SampleWeights {
  std::vector<double> w;
};

SampleWeights uniform_weights(std::size_t n);

/// Weights proportional to (min-max normalized score + eps) over the training
/// set; uniform when every score is equal.
SampleWeights weights_from_scores(std::span<const double> scores, double eps);
SampleWeights update_sample_weights(const EnsembleModel& model, const Matrix& train, double eps);

enum class WeightingMode {
  Sampling,        // minibatches drawn with replacement under W_e, plain mean loss
  LossMultiplier,  // uniform minibatches, per-sample loss scaled by W_e
};

struct TrainConfig {
  std::size_t epochs = 20;
  /// Iterations per epoch; 0 means I * ceil(N / batch_size).
  std::size_t iterations = 0;
  std::size_t batch_size = 128;
  OptimizerSettings optimizer;
  double reweight_eps = 0.05;
  WeightingMode weighting = WeightingMode::Sampling;
  /// Keep W_e uniform for every epoch (skips re-weighting).
  bool pin_uniform_weights = false;
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t iterations_for(std::size_t members, std::size_t n) const noexcept;
};

struct EpochTrace {
  std::size_t epoch = 0;
  double reconstruction = 0.0;
  double encoding = 0.0;
  double combined = 0.0;
};

struct IterationInfo {
  std::size_t epoch = 0;
  std::size_t iteration = 0;
  std::size_t member = 0;
  LossBreakdown loss;
};

using IterationObserver = std::function<void(const IterationInfo&, const EnsembleModel&)>;

/// Trains `model` in place on normal-only rows and returns the per-epoch mean
/// batch losses. Throws DivergenceError on a non-finite loss or parameter.
std::vector<EpochTrace> train_ensemble(EnsembleModel& model, const Matrix& train,
                                       const TrainConfig& cfg,
                                       const IterationObserver& observer = {});

}  // namespace edeen
