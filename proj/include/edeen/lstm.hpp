#pragma once

#include <cstdint>
#include <vector>

#include "edeen/matrix.hpp"

namespace edeen {

class Rng;

/// Single LSTM layer. Gates are laid out (input, forget, cell candidate,
/// output) along the columns of `weights`, which maps the concatenation
/// [x_t, h_{t-1}] (input_dim + hidden_dim wide) to 4 * hidden_dim.
struct LstmCell {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  Matrix weights;            // (input_dim + hidden_dim) x (4 * hidden_dim)
  std::vector<double> bias;  // 4 * hidden_dim

  LstmCell() = default;
  LstmCell(std::size_t input_dim, std::size_t hidden_dim);

  /// Uniform weights in +-1/sqrt(input_dim + hidden_dim), forget-gate bias 1.
  void initialize(Rng& rng);
};

/// Everything lstm_backward needs. Tied to the cell it came from by shape and
/// a parameter fingerprint taken at forward time.
struct LstmCache {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  std::size_t batch = 0;
  std::uint64_t fingerprint = 0;
  std::vector<Matrix> concat;  // [x_t, h_{t-1}] per step
  std::vector<Matrix> gates;   // post-activation i, f, g, o per step
  std::vector<Matrix> cell;    // c_t
  std::vector<Matrix> cell_tanh;
  Matrix c0;
};

struct LstmForward {
  std::vector<Matrix> hidden;  // h_t per step, batch x hidden_dim
  Matrix final_cell;
  LstmCache cache;
};

struct LstmGradients {
  Matrix weights;
  std::vector<double> bias;
  std::vector<Matrix> inputs;  // d/dx_t per step
  Matrix h0;
  Matrix c0;
};

/// Each sequence element is a batch x input_dim matrix (a single row for one
/// sample). h0 and c0 are batch x hidden_dim.
LstmForward lstm_forward(const LstmCell& cell, const std::vector<Matrix>& sequence,
                         const Matrix& h0, const Matrix& c0);

/// grad_hidden holds dL/dh_t for every step (zeros where the loss ignores h_t).
LstmGradients lstm_backward(const LstmCell& cell, const LstmCache& cache,
                            const std::vector<Matrix>& grad_hidden);

std::uint64_t parameter_fingerprint(const LstmCell& cell) noexcept;

}  // namespace edeen
