#pragma once

#include <span>
#include <vector>

#include "edeen/matrix.hpp"

namespace edeen {

class Rng;

enum class Activation { Tanh, Identity };

/// Fully connected layer, y = act(x W + b). W is in_dim x out_dim.
struct DenseLayer {
  Matrix weights;
  std::vector<double> bias;
  Activation activation = Activation::Identity;

  DenseLayer() = default;
  DenseLayer(std::size_t in_dim, std::size_t out_dim, Activation act);

  std::size_t in_dim() const noexcept { return weights.rows(); }
  std::size_t out_dim() const noexcept { return weights.cols(); }

  /// Uniform in [-1/sqrt(in_dim), 1/sqrt(in_dim)] for weights and bias.
  void initialize(Rng& rng);
};

struct DenseGradients {
  Matrix input;
  Matrix weights;
  std::vector<double> bias;
};

Matrix dense_forward(const DenseLayer& layer, const Matrix& input);

/// Backward pass given the forward output (avoids recomputing it).
DenseGradients dense_backward(const DenseLayer& layer, const Matrix& cached_input,
                              const Matrix& cached_output, const Matrix& grad_out);
/// Backward pass that recomputes the forward output from the cached input.
DenseGradients dense_backward(const DenseLayer& layer, const Matrix& cached_input,
                              const Matrix& grad_out);

}  // namespace edeen
