#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace edeen {

enum class EncoderKind { FeedForward, Lstm };

std::string to_string(EncoderKind kind);
EncoderKind encoder_kind_from_string(const std::string& s);

/// Shape and loss weighting of one encoder-decoder-encoder network.
///
/// FeedForward: encoder d -> h1 -> h2 -> c (Tanh, Tanh, Identity) and decoder
/// c -> h2 -> h1 -> d (Tanh, Tanh, Identity); `hidden_sizes` = {h1, h2}.
///
/// Lstm: a row of d features is cut into `seq_len` chunks of ceil(d/seq_len)
/// features (zero padded). The encoder runs `recurrent_layers` stacked LSTMs
/// and projects the final hidden state to c. The decoder feeds the latent
/// vector at every step and projects each hidden state back to a chunk.
struct ArchSpec {
  std::size_t input_dim = 0;
  std::size_t latent_dim = 0;
  EncoderKind encoder_kind = EncoderKind::FeedForward;
  std::vector<std::size_t> hidden_sizes{64, 32};
  std::size_t recurrent_layers = 1;
  std::size_t lstm_hidden = 32;
  std::size_t seq_len = 1;
  double alpha = 1.0;
  double beta = 1.0;

  std::size_t chunk_width() const noexcept {
    return (input_dim + seq_len - 1) / seq_len;
  }

  /// Throws PreconditionError describing the first violated invariant.
  void validate() const;

  friend bool operator==(const ArchSpec&, const ArchSpec&) = default;
};

/// max(1, floor(d / 4)).
std::size_t default_latent_dim(std::size_t input_dim) noexcept;

/// Feed-forward spec with the default widths.
ArchSpec make_feedforward_spec(std::size_t input_dim, std::size_t latent_dim = 0);
ArchSpec make_lstm_spec(std::size_t input_dim, std::size_t hidden, std::size_t seq_len,
                        std::size_t layers = 1, std::size_t latent_dim = 0);

}  // namespace edeen
