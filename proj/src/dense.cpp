#include "edeen/dense.hpp"

#include <cmath>
#include <string>

#include "edeen/error.hpp"
#include "edeen/kernels.hpp"
#include "edeen/rng.hpp"

namespace edeen {

DenseLayer::DenseLayer(std::size_t in_dim, std::size_t out_dim, Activation act)
    : weights(in_dim, out_dim), bias(out_dim, 0.0), activation(act) {}

void DenseLayer::initialize(Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_dim()));
  for (double& w : weights.values()) w = rng.uniform(-bound, bound);
  for (double& b : bias) b = rng.uniform(-bound, bound);
}

Matrix dense_forward(const DenseLayer& layer, const Matrix& input) {
  if (input.cols() != layer.in_dim())
    throw ShapeError("dense_forward: input has " + std::to_string(input.cols()) +
                     " columns, layer expects " + std::to_string(layer.in_dim()));
  if (layer.bias.size() != layer.out_dim()) throw ShapeError("dense_forward: bias size");
  Matrix out = matmul(input, layer.weights);
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    kernels::add(layer.bias.data(), row.data(), row.size());
    if (layer.activation == Activation::Tanh)
      for (double& v : row) v = std::tanh(v);
  }
  return out;
}

DenseGradients dense_backward(const DenseLayer& layer, const Matrix& cached_input,
                              const Matrix& cached_output, const Matrix& grad_out) {
  if (cached_input.cols() != layer.in_dim() || grad_out.cols() != layer.out_dim() ||
      grad_out.rows() != cached_input.rows() || cached_output.rows() != grad_out.rows() ||
      cached_output.cols() != grad_out.cols())
    throw ShapeError("dense_backward: inconsistent shapes");

  Matrix grad_pre = grad_out;
  if (layer.activation == Activation::Tanh) {
    auto g = grad_pre.values();
    auto y = cached_output.values();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] *= 1.0 - y[i] * y[i];
  }

  DenseGradients grads;
  grads.weights = matmul_tn(cached_input, grad_pre);
  grads.bias.assign(layer.out_dim(), 0.0);
  for (std::size_t r = 0; r < grad_pre.rows(); ++r)
    kernels::add(grad_pre.row(r).data(), grads.bias.data(), layer.out_dim());
  grads.input = matmul_nt(grad_pre, layer.weights);
  return grads;
}

DenseGradients dense_backward(const DenseLayer& layer, const Matrix& cached_input,
                              const Matrix& grad_out) {
  return dense_backward(layer, cached_input, dense_forward(layer, cached_input), grad_out);
}

}  // namespace edeen
