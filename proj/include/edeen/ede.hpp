#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "edeen/arch.hpp"
#include "edeen/matrix.hpp"
#include "edeen/optim.hpp"
#include "edeen/stage.hpp"

namespace edeen {

struct EdeForward {
  Matrix z;        // E_1(x)
  Matrix x_recon;  // D(z)
  Matrix z_prime;  // E_2(x_recon)
};

/// Encoder-decoder-encoder network: E_1 (phi), D (psi), E_2 (phi-tilde).
/// E_1 and E_2 share a shape but own separate parameters.
class EdeNet {
 public:
  EdeNet() = default;
  /// Builds the three stages and draws their initial parameters from `seed`.
  EdeNet(ArchSpec spec, std::uint64_t seed);
  /// Zero-initialized parameters (used by the loader and by tests). `seed`
  /// is only recorded.
  static EdeNet zeros(ArchSpec spec, std::uint64_t seed = 0);

  const ArchSpec& spec() const noexcept { return spec_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const Stage& encoder() const noexcept { return e1_; }
  const Stage& decoder() const noexcept { return dec_; }
  const Stage& reencoder() const noexcept { return e2_; }

  EdeForward forward(const Matrix& x) const;

  /// Named tensors in E_1, D, E_2 order, prefixed "e1.", "d.", "e2.".
  std::vector<ConstNamedTensor> parameters() const;
  std::vector<NamedTensor> mutable_parameters();
  std::vector<std::size_t> parameter_sizes() const;

  friend bool operator==(const EdeNet& a, const EdeNet& b);

 private:
  ArchSpec spec_;
  std::uint64_t seed_ = 0;
  Stage e1_;
  Stage dec_;
  Stage e2_;
};

/// Mean per-sample losses of one batch under the effective sample weights.
struct LossBreakdown {
  double reconstruction = 0.0;
  double encoding = 0.0;
  double combined = 0.0;
};

/// Gradients in EdeNet::parameters() order.
struct EdeGradients {
  GradientList encoder;
  GradientList decoder;
  GradientList reencoder;

  GradientList flatten() const;
};

struct LossAndGradients {
  LossBreakdown loss;
  EdeGradients grads;
};

/// Per-row ||x_j - x'_j||_2.
std::vector<double> reconstruction_loss(const Matrix& x, const Matrix& x_recon);
/// Per-row ||z_j - z'_j||_2.
std::vector<double> encoding_loss(const Matrix& z, const Matrix& z_prime);

/// Sum_j (w_j / sum w) (alpha Lr_j + beta Le_j); plain batch mean when
/// `weights` is empty. Throws DegenerateWeightsError on an all-zero vector.
double combined_loss(const EdeNet& net, const Matrix& x,
                     std::optional<std::span<const double>> weights = std::nullopt);

/// combined_loss plus its gradient w.r.t. every parameter of the net. The
/// norm's gradient at zero is taken as 0.
LossAndGradients loss_and_gradients(const EdeNet& net, const Matrix& x,
                                    std::optional<std::span<const double>> weights = std::nullopt);

/// One optimizer step on all three parameter bundles of `net`.
void apply_gradients(EdeNet& net, AdamState& state, const EdeGradients& grads);

/// Latent-space encoding error ||E_1(x) - E_2(D(E_1(x)))||_2 per row.
std::vector<double> anomaly_score(const EdeNet& net, const Matrix& x);

/// Min-max map onto [0, 1]; all zeros when every score is equal.
std::vector<double> normalize_scores(std::span<const double> raw);

struct ScoreVector {
  std::vector<double> raw;
  std::optional<std::vector<double>> normalized;
};

}  // namespace edeen
