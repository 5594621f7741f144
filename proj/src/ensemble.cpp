#include "edeen/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "edeen/error.hpp"
#include "edeen/rng.hpp"

namespace edeen {

EnsembleModel::EnsembleModel(ArchSpec spec, std::uint64_t seed, std::vector<EdeNet> members)
    : spec_(std::move(spec)), seed_(seed), members_(std::move(members)) {
  if (members_.empty()) throw PreconditionError("ensemble needs at least one member");
  for (const EdeNet& m : members_)
    if (!(m.spec() == spec_)) throw ShapeError("ensemble members must share one architecture");
}

EnsembleModel init_ensemble(const ArchSpec& spec, std::size_t members, std::uint64_t seed) {
  if (members == 0) throw PreconditionError("init_ensemble: I must be at least 1");
  spec.validate();
  std::vector<EdeNet> nets;
  nets.reserve(members);
  for (std::size_t i = 0; i < members; ++i) nets.emplace_back(spec, mix_seed(seed, i));
  return EnsembleModel(spec, seed, std::move(nets));
}

std::vector<double> ensemble_score(const EnsembleModel& model, const Matrix& x) {
  std::vector<double> total = anomaly_score(model.member(0), x);
  for (std::size_t i = 1; i < model.size(); ++i) {
    const std::vector<double> s = anomaly_score(model.member(i), x);
    for (std::size_t j = 0; j < s.size(); ++j) total[j] += s[j];
  }
  if (model.size() > 1) {
    const double n = static_cast<double>(model.size());
    for (double& v : total) v /= n;
  }
  return total;
}

SampleWeights uniform_weights(std::size_t n) {
  return {std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

SampleWeights weights_from_scores(std::span<const double> scores, double eps) {
  if (scores.empty()) throw PreconditionError("sample weights: empty training set");
  if (!(eps >= 0.0)) throw PreconditionError("sample weights: eps must be nonnegative");
  const auto [lo, hi] = std::ranges::minmax_element(scores);
  if (*lo == *hi) return uniform_weights(scores.size());
  std::vector<double> w = normalize_scores(scores);
  for (double& v : w) v += eps;
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& v : w) v /= total;
  return {std::move(w)};
}

SampleWeights update_sample_weights(const EnsembleModel& model, const Matrix& train, double eps) {
  if (train.rows() == 0) throw PreconditionError("sample weights: empty training set");
  return weights_from_scores(ensemble_score(model, train), eps);
}

void TrainConfig::validate() const {
  if (batch_size == 0) throw PreconditionError("train config: batch_size must be at least 1");
  if (!(reweight_eps >= 0.0)) throw PreconditionError("train config: reweight eps must be >= 0");
  if (!(optimizer.lr > 0.0)) throw PreconditionError("train config: learning rate must be > 0");
}

std::size_t TrainConfig::iterations_for(std::size_t members, std::size_t n) const noexcept {
  if (iterations > 0) return iterations;
  return members * ((n + batch_size - 1) / batch_size);
}

std::vector<EpochTrace> train_ensemble(EnsembleModel& model, const Matrix& train,
                                       const TrainConfig& cfg, const IterationObserver& observer) {
  cfg.validate();
  if (train.cols() != model.spec().input_dim)
    throw ShapeError("train_ensemble: data has " + std::to_string(train.cols()) +
                     " features, model expects " + std::to_string(model.spec().input_dim));
  std::vector<EpochTrace> trace;
  if (cfg.epochs == 0) return trace;
  if (train.rows() == 0) throw PreconditionError("train_ensemble: empty training set");

  const std::size_t n = train.rows();
  const std::size_t members = model.size();
  const std::size_t iterations = cfg.iterations_for(members, n);

  std::vector<AdamState> optimizers;
  optimizers.reserve(members);
  for (std::size_t i = 0; i < members; ++i) {
    const std::vector<std::size_t> sizes = model.member(i).parameter_sizes();
    optimizers.emplace_back(cfg.optimizer, sizes);
  }

  Rng rng(cfg.seed);
  SampleWeights weights = uniform_weights(n);
  std::vector<double> cumulative(n);
  std::vector<std::size_t> batch(cfg.batch_size);
  std::vector<double> batch_weights(cfg.batch_size);

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    if (!cfg.pin_uniform_weights) weights = update_sample_weights(model, train, cfg.reweight_eps);
    std::partial_sum(weights.w.begin(), weights.w.end(), cumulative.begin());
    const bool draw_weighted = !cfg.pin_uniform_weights && cfg.weighting == WeightingMode::Sampling;

    EpochTrace epoch_trace{epoch, 0.0, 0.0, 0.0};
    for (std::size_t it = 1; it <= iterations; ++it) {
      // A single member needs no draw, which keeps I = 1 on the plain batch stream.
      const std::size_t member = members == 1 ? 0 : rng.uniform_index(members);
      for (std::size_t b = 0; b < cfg.batch_size; ++b)
        batch[b] = draw_weighted ? rng.sample_cumulative(cumulative) : rng.uniform_index(n);
      const Matrix x = train.gather_rows(batch);

      EdeNet& net = model.member(member);
      LossAndGradients lg;
      if (cfg.weighting == WeightingMode::LossMultiplier && !cfg.pin_uniform_weights) {
        for (std::size_t b = 0; b < cfg.batch_size; ++b) batch_weights[b] = weights.w[batch[b]];
        lg = loss_and_gradients(net, x, std::span<const double>(batch_weights));
      } else {
        lg = loss_and_gradients(net, x);
      }
      if (!std::isfinite(lg.loss.combined)) throw DivergenceError(epoch, it);
      apply_gradients(net, optimizers[member], lg.grads);
      for (const ConstNamedTensor& t : std::as_const(net).parameters())
        if (!std::ranges::all_of(t.values, [](double v) { return std::isfinite(v); }))
          throw DivergenceError(epoch, it);

      epoch_trace.reconstruction += lg.loss.reconstruction;
      epoch_trace.encoding += lg.loss.encoding;
      epoch_trace.combined += lg.loss.combined;
      if (observer) observer({epoch, it, member, lg.loss}, model);
    }
    const double denom = static_cast<double>(iterations);
    epoch_trace.reconstruction /= denom;
    epoch_trace.encoding /= denom;
    epoch_trace.combined /= denom;
    trace.push_back(epoch_trace);
  }
  return trace;
}

}  // namespace edeen
