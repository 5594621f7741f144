#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "edeen/arch.hpp"
#include "edeen/dense.hpp"
#include "edeen/lstm.hpp"
#include "edeen/matrix.hpp"

namespace edeen {

class Rng;

struct NamedTensor {
  std::string name;
  std::span<double> values;
};

struct ConstNamedTensor {
  std::string name;
  std::span<const double> values;
};

/// One gradient vector per parameter tensor, in parameter order.
using GradientList = std::vector<std::vector<double>>;

/// Chain of dense layers.
struct DenseStack {
  std::vector<DenseLayer> layers;

  struct Cache {
    std::vector<Matrix> activations;  // input followed by every layer output
  };

  Matrix forward(const Matrix& x, Cache* cache) const;
  Matrix backward(const Cache& cache, const Matrix& grad_out, GradientList& grads) const;
  std::vector<ConstNamedTensor> parameters() const;
};

/// Tabular row -> chunked sequence -> stacked LSTM -> linear latent.
struct LstmEncoder {
  std::size_t input_dim = 0;
  std::size_t seq_len = 1;
  std::vector<LstmCell> cells;
  DenseLayer projection;

  struct Cache {
    std::vector<LstmCache> layers;
    Matrix last_hidden;
    Matrix latent;
  };

  std::size_t chunk() const noexcept { return (input_dim + seq_len - 1) / seq_len; }
  Matrix forward(const Matrix& x, Cache* cache) const;
  Matrix backward(const Cache& cache, const Matrix& grad_out, GradientList& grads) const;
  std::vector<ConstNamedTensor> parameters() const;
};

/// Latent repeated over seq_len steps -> stacked LSTM -> per-step linear
/// chunk -> concatenated row truncated to output_dim.
struct LstmDecoder {
  std::size_t output_dim = 0;
  std::size_t seq_len = 1;
  std::vector<LstmCell> cells;
  DenseLayer projection;

  struct Cache {
    std::vector<LstmCache> layers;
    std::vector<Matrix> top_hidden;
    std::vector<Matrix> chunks;
  };

  std::size_t chunk() const noexcept { return (output_dim + seq_len - 1) / seq_len; }
  Matrix forward(const Matrix& z, Cache* cache) const;
  Matrix backward(const Cache& cache, const Matrix& grad_out, GradientList& grads) const;
  std::vector<ConstNamedTensor> parameters() const;
};

using StageCache = std::variant<DenseStack::Cache, LstmEncoder::Cache, LstmDecoder::Cache>;

/// One of E_1, D or E_2.
class Stage {
 public:
  using Body = std::variant<DenseStack, LstmEncoder, LstmDecoder>;

  Stage() = default;
  explicit Stage(Body body) : body_(std::move(body)) {}

  static Stage encoder(const ArchSpec& spec);
  static Stage decoder(const ArchSpec& spec);

  void initialize(Rng& rng);

  /// `cache` may be null for inference-only calls.
  Matrix forward(const Matrix& x, StageCache* cache) const;
  /// Returns dL/dinput; parameter gradients are added into `grads`, which
  /// must be shaped like parameters() (see zero_gradients()).
  Matrix backward(const StageCache& cache, const Matrix& grad_out, GradientList& grads) const;

  std::vector<ConstNamedTensor> parameters() const;
  std::vector<NamedTensor> mutable_parameters();
  GradientList zero_gradients() const;

  const Body& body() const noexcept { return body_; }

 private:
  Body body_;
};

}  // namespace edeen
